"""Safety-prioritizing laws for data where the CLF and CBF conditions conflict.

Where the two constraints cannot hold together, ``k_l_star``/``k_m_star``
drop the CLF condition and return ``-a1/b1``, which makes the barrier
residual exactly zero (``hdot = -alpha_h(h)``): the state slides toward the
boundary of the safe set without crossing it. Elsewhere they coincide with
``k_l``/``k_m``.

The ``*_sharp`` variants blend in the CLF formula near the origin with weight
``mu_c(x) = 1 / (1 + c |x|^2)``, which restores continuity at ``x = 0``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .blend import BlendConfig, compatible, k_l, k_m, mixed_sign
from .errors import DomainError, InconsistencyError
from .feasibility import SetKind, feasible_set
from .formulas import universal
from .plant import LieData

__all__ = [
    "Mode",
    "SafetyPriorityConfig",
    "B1_TOL",
    "DEFAULT_C",
    "mode",
    "k_l_star",
    "k_m_star",
    "mu_c",
    "k_l_sharp",
    "k_m_sharp",
    "min_norm_baseline",
]

B1_TOL = 1e-12
DEFAULT_C = 1e5
_BASELINE_MARGIN = 1e-9


class Mode(enum.IntEnum):
    INCOMPATIBLE = 0
    COMPATIBLE = 1


@dataclass(frozen=True)
class SafetyPriorityConfig:
    blend: BlendConfig = field(default_factory=BlendConfig)
    c: float = DEFAULT_C

    def __post_init__(self):
        if not self.c > 0:
            raise DomainError(f"c must be positive, got {self.c!r}")


def mode(d: LieData) -> Mode:
    return Mode.COMPATIBLE if compatible(d) else Mode.INCOMPATIBLE


def _boundary_tracking(d: LieData) -> float:
    if abs(d.b1) < B1_TOL:
        raise InconsistencyError(
            f"incompatible Lie data with vanishing b1={d.b1!r}; "
            "the CLF/CBF pair violates its defining conditions here"
        )
    return -d.a1 / d.b1


def k_l_star(d: LieData, cfg: BlendConfig = BlendConfig()) -> float:
    if mixed_sign(d) and not compatible(d):
        return _boundary_tracking(d)
    return k_l(d, cfg)


def k_m_star(d: LieData, cfg: BlendConfig = BlendConfig()) -> float:
    if mixed_sign(d) and not compatible(d):
        return _boundary_tracking(d)
    return k_m(d, cfg)


def _weights(x, c: float):
    r2 = float(np.dot(x, x))
    cr2 = c * r2
    return cr2 / (1.0 + cr2), 1.0 / (1.0 + cr2)


def mu_c(x, c: float = DEFAULT_C) -> float:
    if not c > 0:
        raise DomainError(f"c must be positive, got {c!r}")
    return _weights(np.asarray(x, dtype=float), c)[1]


def _sharp(star, d: LieData, x, cfg: SafetyPriorityConfig) -> float:
    w_star, w_clf = _weights(np.asarray(x, dtype=float), cfg.c)
    phi0 = universal(cfg.blend.formula, d.a0, d.b0)
    if w_star == 0.0:
        return phi0
    return w_star * star(d, cfg.blend) + w_clf * phi0


def k_l_sharp(d: LieData, x, cfg: SafetyPriorityConfig = SafetyPriorityConfig()) -> float:
    return _sharp(k_l_star, d, x, cfg)


def k_m_sharp(d: LieData, x, cfg: SafetyPriorityConfig = SafetyPriorityConfig()) -> float:
    return _sharp(k_m_star, d, x, cfg)


def min_norm_baseline(d: LieData) -> float:
    """Smallest-magnitude feasible control, pulled off the boundary by a relative margin.

    At the origin the CLF inequality cannot be strict, so only the barrier
    constraint is used there. Benchmark plumbing only; it carries none of the
    continuity guarantees of the blended laws.
    """
    if d.x_is_origin:
        d = LieData(-1.0, 0.0, d.a1, d.b1, True)
    fs = feasible_set(d)
    if fs.kind is SetKind.EMPTY:
        raise DomainError("feasible set is empty")
    if 0.0 in fs:
        return 0.0
    if fs.kind is SetKind.INTERVAL:
        margin = _BASELINE_MARGIN * (fs.upper - fs.lower)
    else:
        bound = fs.upper if fs.kind is SetKind.BELOW else fs.lower
        margin = _BASELINE_MARGIN * max(1.0, abs(bound))
    if fs.upper <= 0.0:
        return fs.upper - margin
    return fs.lower + margin
