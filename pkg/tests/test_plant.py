import math

import numpy as np
import pytest

from safestab.errors import DomainError, EvaluationError
from safestab.plant import (
    CbfSpec,
    ClfSpec,
    Dynamics,
    SystemBundle,
    as_state,
    check_bundle,
    fd_gradient,
    lie_data,
    planar_example,
)


def test_as_state():
    np.testing.assert_array_equal(as_state([1, 2]), [1.0, 2.0])
    with pytest.raises(DomainError):
        as_state([])
    with pytest.raises(DomainError):
        as_state([1.0, math.nan])
    with pytest.raises(DomainError):
        as_state([1.0], n=2)


def test_fd_gradient_matches_analytic(example):
    x = np.array([0.7, -1.3])
    np.testing.assert_allclose(fd_gradient(example.clf.V, x), example.clf.grad(x), rtol=1e-8)
    np.testing.assert_allclose(fd_gradient(example.cbf.h, x), example.cbf.grad(x), rtol=1e-8)


def test_fd_gradient_rejects_nonfinite():
    with pytest.raises(EvaluationError) as info:
        fd_gradient(lambda x: 1.0 / x[0] if x[0] > 0 else math.nan, np.array([0.0]))
    assert info.value.field == "fd_gradient"


def test_example_lie_data_by_hand(example):
    # x = (1, 0): s = 2 + sin 1
    d = lie_data(example, [1.0, 0.0])
    s = 2.0 + math.sin(1.0)
    gV = np.array([1.0 + s * (2.0 + math.cos(1.0)), s])
    f = np.array([1.0 + math.sin(1.0), 1.0])
    assert d.a0 == pytest.approx(gV @ f + 0.5 * (1.0 + 2.0 * s * s), rel=1e-14)
    assert d.a0 == pytest.approx(26.549, abs=1e-3)
    assert d.b0 == pytest.approx(2.0 * s)
    h = 8.0 * 0.25 + 1.1
    assert d.a1 == pytest.approx(-(16.0 * 0.5 * f[0] + 1.0) - h)
    assert d.b1 == -2.0
    assert not d.x_is_origin


def test_origin_flag(example):
    d = lie_data(example, [0.0, 0.0])
    assert d.x_is_origin and d.a0 == 0.0 and d.b0 == 0.0


def test_fd_fallback_bundle(example):
    clf = ClfSpec(V=example.clf.V, alpha=example.clf.alpha)
    cbf = CbfSpec(h=example.cbf.h, alpha_h=example.cbf.alpha_h)
    fd = SystemBundle(example.dynamics, clf, cbf)
    x = [0.4, 0.9]
    d1, d2 = lie_data(example, x), lie_data(fd, x)
    for name in ("a0", "b0", "a1", "b1"):
        assert getattr(d2, name) == pytest.approx(getattr(d1, name), rel=1e-7, abs=1e-8)


def test_check_bundle(example):
    assert check_bundle(example) == []
    bad = SystemBundle(
        Dynamics(lambda x: np.array([1.0]), lambda x: np.array([1.0]), 1),
        ClfSpec(V=lambda x: x[0] ** 2, alpha=lambda x: x[0] ** 2, gradV=lambda x: 2 * x),
        CbfSpec(h=lambda x: -1.0, alpha_h=lambda s: s, gradh=lambda x: np.zeros(1)),
    )
    problems = check_bundle(bad, samples=5)
    assert "f(0) != 0" in problems
    assert any("h(0) <= 0" in p for p in problems)


def test_nonfinite_lie_data():
    bundle = SystemBundle(
        Dynamics(lambda x: np.array([math.inf]), lambda x: np.array([1.0]), 1),
        ClfSpec(V=lambda x: x[0] ** 2, alpha=lambda x: x[0] ** 2, gradV=lambda x: 2 * x),
        CbfSpec(h=lambda x: 1.0, alpha_h=lambda s: s, gradh=lambda x: np.ones(1)),
    )
    with pytest.raises(EvaluationError) as info:
        lie_data(bundle, [1.0])
    assert info.value.field == "a0"


def test_example_validation():
    with pytest.raises(DomainError):
        planar_example(q=0.0)
    assert dict(planar_example(q=3.0).params)["q"] == 3.0
