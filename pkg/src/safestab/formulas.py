"""Universal feedback formulas and smooth max/min approximations.

Both formulas map a pair ``(a, b)`` describing the affine constraint
``a + b*u < 0`` to a control value that satisfies it whenever ``b != 0``,
and return 0 when ``b == 0``.
"""

import enum
import math

__all__ = [
    "FormulaKind",
    "phi_sontag",
    "phi_freeman",
    "universal",
    "smooth_max0",
    "smooth_max",
    "smooth_min",
]


class FormulaKind(str, enum.Enum):
    SONTAG = "sontag"
    FREEMAN = "freeman"


def phi_sontag(a: float, b: float) -> float:
    """Sontag's formula ``-(a + sqrt(a^2 + b^4)) / b``, and 0 at ``b == 0``.

    For ``a <= 0`` the numerator is rewritten as ``b^4 / (sqrt(a^2 + b^4) - a)``
    so that small ``b`` does not cancel catastrophically. ``hypot`` keeps the
    square root free of overflow.
    """
    if b == 0.0:
        return 0.0
    r = math.hypot(a, b * b)
    if a > 0.0:
        return -(a + r) / b
    return -(b * b * b) / (r - a)


def phi_freeman(a: float, b: float) -> float:
    """Freeman-Kokotovic pointwise min-norm formula ``-max(a + b^2, 0) / b``."""
    if b == 0.0:
        return 0.0
    return -max(a + b * b, 0.0) / b


_FORMULAS = {
    FormulaKind.SONTAG: phi_sontag,
    FormulaKind.FREEMAN: phi_freeman,
}


def universal(kind, a: float, b: float) -> float:
    """Apply the formula selected by ``kind`` to ``(a, b)``."""
    return _FORMULAS[FormulaKind(kind)](a, b)


def smooth_max0(s: float, eps: float) -> float:
    """Softplus ``eps * ln(1 + exp(s / eps))``, a smooth upper bound of ``max(s, 0)``.

    The gap to ``max(s, 0)`` lies in ``[0, eps*ln 2]`` and peaks at ``s = 0``.
    """
    if not eps > 0.0:
        raise ValueError(f"eps must be positive, got {eps!r}")
    z = s / eps
    if z > 0.0:
        return s + eps * math.log1p(math.exp(-z))
    return eps * math.log1p(math.exp(z))


def smooth_max(x: float, y: float, eps: float) -> float:
    return y + smooth_max0(x - y, eps)


def smooth_min(x: float, y: float, eps: float) -> float:
    return y - smooth_max0(y - x, eps)
