import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from safestab.blend import BlendConfig, compatible, k_l, k_m
from safestab.errors import DomainError, InconsistencyError
from safestab.formulas import phi_sontag
from safestab.plant import LieData
from safestab.priority import (
    Mode,
    SafetyPriorityConfig,
    k_l_sharp,
    k_l_star,
    k_m_sharp,
    k_m_star,
    min_norm_baseline,
    mode,
    mu_c,
)

coef = st.floats(-10, 10)
mag = st.floats(1e-3, 10)


def test_mode():
    assert mode(LieData(-3.0, 1.0, -1.0, -1.0)) is Mode.COMPATIBLE
    assert mode(LieData(-1.0, 1.0, 1.0, -1.0)) is Mode.INCOMPATIBLE


def test_star_tracks_barrier_when_incompatible():
    d = LieData(-1.0, 1.0, 2.0, -1.0)  # lo = 2 >= hi = 1
    assert k_l_star(d) == 2.0 and k_m_star(d) == 2.0


def test_star_equals_blend_when_compatible():
    d = LieData(-3.0, 1.0, -1.0, -1.0)
    assert k_l_star(d) == k_l(d)
    assert k_m_star(d) == k_m(d)


def test_vanishing_b1_is_inconsistent():
    d = LieData(-1.0, 1.0, 2.0, -1e-13)
    assert not compatible(d)
    with pytest.raises(InconsistencyError):
        k_l_star(d)


@given(coef, coef, mag, mag, st.booleans())
def test_star_residual_zero_when_incompatible(ai, aj, bi, bj, flip):
    d = LieData(aj, -bj, ai, bi) if flip else LieData(ai, bi, aj, -bj)
    assume(not compatible(d))
    for fn in (k_l_star, k_m_star):
        u = fn(d)
        assert abs(d.a1 + d.b1 * u) <= 1e-12 * (abs(d.a1) + abs(d.b1 * u))


def test_mu_c():
    assert mu_c(np.zeros(2)) == 1.0
    assert mu_c(np.array([1.0, 0.0]), c=1.0) == 0.5
    assert mu_c(np.array([1.0, 0.0])) == pytest.approx(1e-5, rel=1e-4)
    with pytest.raises(DomainError):
        mu_c(np.zeros(2), c=0.0)
    with pytest.raises(DomainError):
        SafetyPriorityConfig(c=-1.0)


def test_sharp_at_origin_is_clf_formula():
    d = LieData(0.0, 0.0, -1.0, -1.0, x_is_origin=True)
    assert k_l_sharp(d, np.zeros(2)) == 0.0
    d = LieData(-1.0, 2.0, -1.0, -1.0)
    assert k_m_sharp(d, np.zeros(2)) == phi_sontag(-1.0, 2.0)


def test_sharp_blend_weights():
    d = LieData(-3.0, 1.0, -1.0, -1.0)
    x = np.array([0.01, 0.0])
    cfg = SafetyPriorityConfig(BlendConfig(), c=1e4)  # c|x|^2 = 1
    expect = 0.5 * k_l(d) + 0.5 * phi_sontag(-3.0, 1.0)
    assert k_l_sharp(d, x, cfg) == pytest.approx(expect, rel=1e-15)


def test_baseline():
    assert min_norm_baseline(LieData(-1.0, 1.0, -1.0, -1.0)) == 0.0
    u = min_norm_baseline(LieData(-3.0, 1.0, -1.0, 1.0))  # (-inf, 1): 0 is inside
    assert u == 0.0
    d = LieData(-5.0, 1.0, 2.0, -1.0)  # (2, 5)
    u = min_norm_baseline(d)
    assert 2.0 < u < 2.0 + 1e-6
    with pytest.raises(DomainError):
        min_norm_baseline(LieData(-1.0, 1.0, 1.0, -1.0))
    # at the origin only the barrier constraint counts
    assert min_norm_baseline(LieData(0.0, 0.0, -1.0, 1.0, x_is_origin=True)) == 0.0
