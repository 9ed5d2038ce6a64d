"""Single-input control-affine plants with an attached CLF and CBF.

A :class:`SystemBundle` carries the dynamics ``xdot = f(x) + g(x) u`` together
with a control Lyapunov function ``V`` (margin ``alpha``) and a control barrier
function ``h`` (class-K-infinity-extended ``alpha_h``). :func:`lie_data`
reduces both design inequalities at a state to the affine pair::

    F0 = a0 + b0 u < 0      (CLF decrease)
    F1 = a1 + b1 u < 0      (barrier condition)

Field handles must be pure and reentrant; non-finite outputs raise
:class:`~safestab.errors.EvaluationError` instead of propagating.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, EvaluationError

__all__ = [
    "ORIGIN_TOL",
    "FD_STEP",
    "Dynamics",
    "ClfSpec",
    "CbfSpec",
    "SystemBundle",
    "LieData",
    "as_state",
    "fd_gradient",
    "lie_data",
    "check_bundle",
    "planar_example",
]

ORIGIN_TOL = 1e-9
FD_STEP = 1e-6

ScalarField = Callable[[np.ndarray], float]
VectorField = Callable[[np.ndarray], np.ndarray]


def as_state(x, n: Optional[int] = None) -> np.ndarray:
    """Coerce ``x`` to a finite 1-D float array, optionally of length ``n``."""
    arr = np.array(x, dtype=float).reshape(-1)
    if arr.size == 0:
        raise DomainError("state must have at least one coordinate")
    if n is not None and arr.size != n:
        raise DomainError(f"state has dimension {arr.size}, expected {n}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"state has non-finite entries: {arr}")
    return arr


def fd_gradient(field: ScalarField, x, step: float = FD_STEP) -> np.ndarray:
    """Central-difference gradient of a scalar field."""
    if not step > 0:
        raise ValueError(f"step must be positive, got {step!r}")
    x = np.array(x, dtype=float).reshape(-1)
    grad = np.empty_like(x)
    e = np.zeros_like(x)
    for k in range(x.size):
        e[k] = step
        hi = float(field(x + e))
        lo = float(field(x - e))
        e[k] = 0.0
        if not (math.isfinite(hi) and math.isfinite(lo)):
            raise EvaluationError(
                f"non-finite field value while differencing coordinate {k} at x={x}",
                state=x.copy(),
                field="fd_gradient",
            )
        grad[k] = (hi - lo) / (2.0 * step)
    return grad


@dataclass(frozen=True)
class Dynamics:
    f: VectorField
    g: VectorField
    n: int

    def rhs(self, x: np.ndarray, u: float) -> np.ndarray:
        return self.f(x) + self.g(x) * u


@dataclass(frozen=True)
class ClfSpec:
    """CLF ``V`` with positive-definite margin field ``alpha``.

    ``gradV`` may be omitted, in which case a central difference with step
    ``fd_step`` is used.
    """

    V: ScalarField
    alpha: ScalarField
    gradV: Optional[VectorField] = None
    fd_step: float = FD_STEP

    def grad(self, x: np.ndarray) -> np.ndarray:
        if self.gradV is not None:
            return np.asarray(self.gradV(x), dtype=float)
        return fd_gradient(self.V, x, self.fd_step)


@dataclass(frozen=True)
class CbfSpec:
    """CBF ``h`` with safe set ``{h >= 0}`` and extended class-K function ``alpha_h``."""

    h: ScalarField
    alpha_h: Callable[[float], float]
    gradh: Optional[VectorField] = None
    fd_step: float = FD_STEP

    def grad(self, x: np.ndarray) -> np.ndarray:
        if self.gradh is not None:
            return np.asarray(self.gradh(x), dtype=float)
        return fd_gradient(self.h, x, self.fd_step)


@dataclass(frozen=True)
class SystemBundle:
    dynamics: Dynamics
    clf: ClfSpec
    cbf: CbfSpec
    label: str = ""
    # set only by builtin constructors; lets the simulator use a compiled loop
    builtin: str = ""
    params: tuple = ()

    @property
    def n(self) -> int:
        return self.dynamics.n

    def V(self, x) -> float:
        return float(self.clf.V(x))

    def h(self, x) -> float:
        return float(self.cbf.h(x))


@dataclass(frozen=True)
class LieData:
    """Lie-derivative data at one state.

    ``a0 = L_f V + alpha``, ``b0 = L_g V``, ``a1 = -L_f h - alpha_h(h)``,
    ``b1 = -L_g h``.
    """

    a0: float
    b0: float
    a1: float
    b1: float
    x_is_origin: bool = False

    def residuals(self, u: float) -> tuple[float, float]:
        return self.a0 + self.b0 * u, self.a1 + self.b1 * u


def _finite(value, name: str, x: np.ndarray) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise EvaluationError(f"{name} is not finite at x={x}", state=x.copy(), field=name)
    return value


def lie_data(bundle: SystemBundle, x) -> LieData:
    x = as_state(x, bundle.n)
    dyn, clf, cbf = bundle.dynamics, bundle.clf, bundle.cbf
    fx = dyn.f(x)
    gx = dyn.g(x)
    gV = clf.grad(x)
    gh = cbf.grad(x)
    hx = _finite(cbf.h(x), "h", x)
    a0 = _finite(np.dot(gV, fx) + clf.alpha(x), "a0", x)
    b0 = _finite(np.dot(gV, gx), "b0", x)
    a1 = _finite(-np.dot(gh, fx) - cbf.alpha_h(hx), "a1", x)
    b1 = _finite(-np.dot(gh, gx), "b1", x)
    return LieData(a0, b0, a1, b1, x_is_origin=bool(np.linalg.norm(x) <= ORIGIN_TOL))


def check_bundle(bundle: SystemBundle, samples: int = 200, radius: float = 3.0, seed: int = 0,
                 zero_tol: float = 1e-9) -> list[str]:
    """Spot-check the standing assumptions on random states.

    Returns a list of human-readable problems; an empty list means every
    sampled check passed. This is not a proof that ``V`` is a CLF or ``h`` a CBF.
    """
    problems = []
    n = bundle.n
    zero = np.zeros(n)
    if np.linalg.norm(bundle.dynamics.f(zero)) > zero_tol:
        problems.append("f(0) != 0")
    if abs(bundle.V(zero)) > zero_tol:
        problems.append("V(0) != 0")
    if abs(float(bundle.clf.alpha(zero))) > zero_tol:
        problems.append("alpha(0) != 0")
    if not bundle.h(zero) > 0:
        problems.append("origin is not in the interior of the safe set (h(0) <= 0)")
    if bundle.cbf.alpha_h(0.0) != 0:
        problems.append("alpha_h(0) != 0")
    grid = np.linspace(-10.0, 10.0, 201)
    ah = np.array([bundle.cbf.alpha_h(s) for s in grid])
    if np.any(np.diff(ah) <= 0) or np.any(np.sign(ah) != np.sign(grid)):
        problems.append("alpha_h is not strictly increasing with sign(alpha_h(s)) = sign(s)")
    rng = np.random.default_rng(seed)
    for x in rng.uniform(-radius, radius, size=(samples, n)):
        if np.linalg.norm(x) <= ORIGIN_TOL:
            continue
        if not bundle.V(x) > 0:
            problems.append(f"V not positive at {x}")
        if not float(bundle.clf.alpha(x)) > 0:
            problems.append(f"alpha not positive at {x}")
        d = lie_data(bundle, x)
        if abs(d.b0) <= zero_tol and not d.a0 < 0:
            problems.append(f"CLF condition fails at {x}")
        if abs(d.b1) <= zero_tol and not d.a1 < 0:
            problems.append(f"CBF condition fails at {x}")
    return problems


def planar_example(k1: float = 1.0, k2: float = 2.0, q: float = 8.0, d1: float = 0.5,
                  d2: float = 1.1) -> SystemBundle:
    """Planar example ``x1' = x1 + sin x1 + x2``, ``x2' = x1^3 + (1 + x1^2) u``.

    CLF ``V = x1^2/2 + s^2/2`` with ``s = x2 + (k1+1) x1 + sin x1``, margin
    ``alpha = (k1 x1^2 + k2 s^2)/2``; barrier ``h = x2 + q (x1-d1)^2 + d2`` with
    ``alpha_h(s) = s``. All gradients are analytic.
    """
    if not (k1 > 0 and k2 > 0 and q > 0):
        raise DomainError("k1, k2 and q must be positive")
    sin, cos = math.sin, math.cos

    def sigma(x1, x2):
        return x2 + (k1 + 1.0) * x1 + sin(x1)

    def f(x):
        x1, x2 = x[0], x[1]
        return np.array([x1 + sin(x1) + x2, x1 ** 3])

    def g(x):
        x1 = x[0]
        return np.array([0.0, 1.0 + x1 * x1])

    def V(x):
        s = sigma(x[0], x[1])
        return 0.5 * x[0] ** 2 + 0.5 * s * s

    def gradV(x):
        x1 = x[0]
        s = sigma(x1, x[1])
        return np.array([x1 + s * (k1 + 1.0 + cos(x1)), s])

    def alpha(x):
        s = sigma(x[0], x[1])
        return 0.5 * (k1 * x[0] ** 2 + k2 * s * s)

    def h(x):
        return x[1] + q * (x[0] - d1) ** 2 + d2

    def gradh(x):
        return np.array([2.0 * q * (x[0] - d1), 1.0])

    def alpha_h(s):
        return s

    label = f"planar_example(k1={k1:g}, k2={k2:g}, q={q:g}, d1={d1:g}, d2={d2:g})"
    return SystemBundle(
        dynamics=Dynamics(f=f, g=g, n=2),
        clf=ClfSpec(V=V, alpha=alpha, gradV=gradV),
        cbf=CbfSpec(h=h, alpha_h=alpha_h, gradh=gradh),
        label=label,
        builtin="planar_example",
        params=(("k1", k1), ("k2", k2), ("q", q), ("d1", d1), ("d2", d2)),
    )
