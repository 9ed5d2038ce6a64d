"""Compatibility test and the compatible-case blended laws ``k_l`` and ``k_m``.

When ``b0`` and ``b1`` have opposite signs, the two constraints bound ``u``
from opposite sides. Let ``i`` index the positive coefficient and ``j`` the
negative one; feasible controls then form the open interval::

    (-a_j/b_j, -a_i/b_i)

which is nonempty exactly when the data are *compatible*. Both laws land
strictly inside that interval, and reduce to ``min``/``max`` of the two
universal formulas when the coefficients share a sign.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

from .errors import DomainError
from .formulas import FormulaKind, universal
from .plant import LieData

__all__ = [
    "LambdaKind",
    "BlendConfig",
    "IndexSplit",
    "mixed_sign",
    "split_indices",
    "delta",
    "compatible",
    "lambda_eval",
    "lambda_pair",
    "k_l",
    "k_m",
]

# Upper bound on ulp steps taken by _interior; a handful always suffices
# unless the feasible interval is only a few ulps wide.
_MAX_NUDGE = 8


class LambdaKind(str, enum.Enum):
    LOGISTIC = "logistic"
    TANH = "tanh"
    ALGEBRAIC = "algebraic"


@dataclass(frozen=True)
class BlendConfig:
    formula: FormulaKind = FormulaKind.SONTAG
    lambda_kind: LambdaKind = LambdaKind.LOGISTIC
    eta: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "formula", FormulaKind(self.formula))
        object.__setattr__(self, "lambda_kind", LambdaKind(self.lambda_kind))
        if not 0.0 < self.eta < 1.0:
            raise DomainError(f"eta must lie in (0, 1), got {self.eta!r}")


class IndexSplit(NamedTuple):
    i: int
    j: int


def mixed_sign(d: LieData) -> bool:
    # Compare signs directly: b0*b1 underflows to 0 for tiny coefficients.
    return (d.b0 > 0.0 and d.b1 < 0.0) or (d.b0 < 0.0 and d.b1 > 0.0)


def split_indices(d: LieData) -> IndexSplit:
    if not mixed_sign(d):
        raise DomainError(f"index split needs b0*b1 < 0, got b0={d.b0!r}, b1={d.b1!r}")
    return IndexSplit(0, 1) if d.b0 > 0.0 else IndexSplit(1, 0)


def _oriented(d: LieData):
    """Return ``(a_i, b_i, a_j, b_j)`` for mixed-sign data."""
    if d.b0 > 0.0:
        return d.a0, d.b0, d.a1, d.b1
    return d.a1, d.b1, d.a0, d.b0


def delta(d: LieData) -> float:
    if d.b0 == 0.0 or d.b1 == 0.0:
        raise DomainError("delta is undefined when b0 or b1 vanishes")
    return -d.a0 / d.b0 - d.a1 / d.b1


def compatible(d: LieData) -> bool:
    """True unless the coefficients have opposite signs and ``-a_j/b_j >= -a_i/b_i``."""
    if not mixed_sign(d):
        return True
    ai, bi, aj, bj = _oriented(d)
    return -aj / bj < -ai / bi


def _logistic_pair(z: float):
    if z >= 0.0:
        e = math.exp(-z)
        return e / (1.0 + e), 1.0 / (1.0 + e)
    e = math.exp(z)
    return 1.0 / (1.0 + e), e / (1.0 + e)


def lambda_pair(kind, z: float):
    """Return ``(1 - lambda(z), lambda(z))`` with both entries accurate.

    Computing the complement directly keeps tiny weights from rounding to
    zero when ``lambda`` saturates.
    """
    kind = LambdaKind(kind)
    if math.isnan(z):
        return 0.5, 0.5
    if kind is LambdaKind.LOGISTIC:
        return _logistic_pair(z)
    if kind is LambdaKind.TANH:
        # (1 + tanh z)/2 == 1/(1 + exp(-2z))
        return _logistic_pair(2.0 * z)
    # (z + sqrt(1+z^2)) / (2 sqrt(1+z^2)); the small side is evaluated as
    # 1 / (2 r (r + |z|)) to avoid cancellation.
    if math.isinf(z):
        return (0.0, 1.0) if z > 0 else (1.0, 0.0)
    r = math.hypot(1.0, z)
    small = 1.0 / (2.0 * r * (r + abs(z)))
    big = 0.5 + 0.5 * abs(z) / r
    return (small, big) if z >= 0.0 else (big, small)


def lambda_eval(kind, z: float) -> float:
    return lambda_pair(kind, z)[1]


def _interior(u: float, ai: float, bi: float, aj: float, bj: float, lo: float, hi: float) -> float:
    """Move ``u`` by at most a few ulps so both strict inequalities hold in floating point.

    The exact law value lies strictly inside ``(lo, hi)``; rounding can land it
    on an endpoint when a blending weight is below the ulp of the result.
    """
    for _ in range(_MAX_NUDGE):
        if u >= hi or ai + bi * u >= 0.0:
            u = math.nextafter(u, -math.inf)
        elif u <= lo or aj + bj * u >= 0.0:
            u = math.nextafter(u, math.inf)
        else:
            break
    return u


def _same_sign(d: LieData, phi0: float, phi1: float) -> float:
    if d.b0 == 0.0 and d.b1 == 0.0:
        return 0.0
    if d.b0 >= 0.0 and d.b1 >= 0.0:
        return min(phi0, phi1)
    return max(phi0, phi1)


def _mixed_setup(d: LieData, cfg: BlendConfig):
    ai, bi, aj, bj = _oriented(d)
    lo, hi = -aj / bj, -ai / bi
    if not lo < hi:
        raise DomainError(
            f"incompatible Lie data: -a_j/b_j = {lo!r} is not below -a_i/b_i = {hi!r}"
        )
    phi_i = universal(cfg.formula, ai, bi)
    phi_j = universal(cfg.formula, aj, bj)
    return ai, bi, aj, bj, lo, hi, phi_i, phi_j


def k_l(d: LieData, cfg: BlendConfig = BlendConfig()) -> float:
    """Lambda-weighted blend of the two clipped universal formulas."""
    if not mixed_sign(d):
        return _same_sign(d, universal(cfg.formula, d.a0, d.b0), universal(cfg.formula, d.a1, d.b1))
    ai, bi, aj, bj, lo, hi, phi_i, phi_j = _mixed_setup(d, cfg)
    w_lo, w_hi = lambda_pair(cfg.lambda_kind, lo + hi)
    u = w_lo * max(phi_i, lo) + w_hi * min(phi_j, hi)
    return _interior(u, ai, bi, aj, bj, lo, hi)


def k_m(d: LieData, cfg: BlendConfig = BlendConfig()) -> float:
    """Median of ``phi_i``, ``phi_j`` and the ``eta``-point of the feasible interval."""
    if not mixed_sign(d):
        return _same_sign(d, universal(cfg.formula, d.a0, d.b0), universal(cfg.formula, d.a1, d.b1))
    ai, bi, aj, bj, lo, hi, phi_i, phi_j = _mixed_setup(d, cfg)
    target = (1.0 - cfg.eta) * hi + cfg.eta * lo
    if math.isnan(target):
        # both endpoints infinite: only reachable as |b| -> 0, where phi_i, phi_j -> 0
        target = 0.0
    u = min(phi_j, max(phi_i, target))
    return _interior(u, ai, bi, aj, bj, lo, hi)
