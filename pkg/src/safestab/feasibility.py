"""Exact feasible-control sets and brute-force checks.

This module is the independent reference for every controller: it intersects
the two strict affine constraints directly, without the index bookkeeping the
controllers use.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .plant import LieData

__all__ = [
    "SetKind",
    "FeasibleSet",
    "FeasibilityReport",
    "feasible_set",
    "feasible_bounds",
    "grid_search",
    "check",
]


class SetKind(str, enum.Enum):
    EMPTY = "empty"
    ALL = "all"
    BELOW = "below"        # (-inf, upper)
    ABOVE = "above"        # (lower, +inf)
    INTERVAL = "interval"  # (lower, upper)


@dataclass(frozen=True)
class FeasibleSet:
    kind: SetKind
    lower: float = -math.inf
    upper: float = math.inf

    def __post_init__(self):
        if self.kind is SetKind.INTERVAL and not self.lower < self.upper:
            raise ValueError(f"open interval needs lower < upper, got ({self.lower}, {self.upper})")

    @property
    def empty(self) -> bool:
        return self.kind is SetKind.EMPTY

    def __contains__(self, u: float) -> bool:
        if self.kind is SetKind.EMPTY:
            return False
        return self.lower < u < self.upper

    def __str__(self):
        if self.kind is SetKind.EMPTY:
            return "{}"
        return f"({self.lower!r}, {self.upper!r})"


@dataclass(frozen=True)
class FeasibilityReport:
    F0: float
    F1: float

    @property
    def clf_ok(self) -> bool:
        return self.F0 < 0.0

    @property
    def cbf_ok(self) -> bool:
        return self.F1 < 0.0

    @property
    def feasible(self) -> bool:
        return self.clf_ok and self.cbf_ok


def feasible_set(d: LieData) -> FeasibleSet:
    lo, hi = -math.inf, math.inf
    for a, b in ((d.a0, d.b0), (d.a1, d.b1)):
        if b > 0.0:
            hi = min(hi, -a / b)
        elif b < 0.0:
            lo = max(lo, -a / b)
        elif a >= 0.0:
            return FeasibleSet(SetKind.EMPTY)
    if not lo < hi:
        return FeasibleSet(SetKind.EMPTY)
    if math.isinf(lo) and math.isinf(hi):
        return FeasibleSet(SetKind.ALL)
    if math.isinf(lo):
        return FeasibleSet(SetKind.BELOW, upper=hi)
    if math.isinf(hi):
        return FeasibleSet(SetKind.ABOVE, lower=lo)
    return FeasibleSet(SetKind.INTERVAL, lo, hi)


def feasible_bounds(a0, b0, a1, b1):
    """Vectorized :func:`feasible_set`.

    Returns ``(lower, upper, nonempty)`` arrays; bounds are ``-inf``/``+inf``
    on unconstrained sides and meaningless where ``nonempty`` is False.
    """
    a0, b0, a1, b1 = (np.asarray(v, dtype=float) for v in (a0, b0, a1, b1))
    lo = np.full(np.broadcast(a0, b0, a1, b1).shape, -np.inf)
    hi = np.full_like(lo, np.inf)
    ok = np.ones(lo.shape, dtype=bool)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        for a, b in ((a0, b0), (a1, b1)):
            r = -a / b
            hi = np.where(b > 0, np.minimum(hi, r), hi)
            lo = np.where(b < 0, np.maximum(lo, r), lo)
            ok &= ~((b == 0) & (a >= 0))
    ok &= lo < hi
    return lo, hi, ok


def grid_search(d: LieData, lo: float, hi: float, n: int) -> np.ndarray:
    """All points of ``linspace(lo, hi, n)`` satisfying both strict constraints."""
    if not lo < hi:
        raise ValueError("need lo < hi")
    if n < 2:
        raise ValueError("need n >= 2")
    u = np.linspace(lo, hi, n)
    mask = (d.a0 + d.b0 * u < 0.0) & (d.a1 + d.b1 * u < 0.0)
    return u[mask]


def check(d: LieData, u: float) -> FeasibilityReport:
    return FeasibilityReport(d.a0 + d.b0 * u, d.a1 + d.b1 * u)
