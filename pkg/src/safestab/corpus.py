"""Random Lie-data corpora covering every sign pattern of ``(b0, b1)``.

Entries are drawn from ``[-10, 10]``. Wherever a coefficient ``b`` is exactly
zero, the matching ``a`` is redrawn negative, since a valid CLF/CBF pair
never produces ``b = 0`` with ``a >= 0``.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

__all__ = [
    "LieBatch",
    "same_sign",
    "zero_b",
    "mixed_compatible",
    "mixed_incompatible",
    "uniform",
    "FAMILIES",
]

BOX = 10.0


class LieBatch(NamedTuple):
    a0: np.ndarray
    b0: np.ndarray
    a1: np.ndarray
    b1: np.ndarray

    def __len__(self):
        return self.a0.size

    def take(self, idx) -> "LieBatch":
        return LieBatch(*(v[idx] for v in self))

    def concat(self, other: "LieBatch") -> "LieBatch":
        return LieBatch(*(np.concatenate([p, q]) for p, q in zip(self, other)))


def _u(rng, n, lo=-BOX, hi=BOX):
    return rng.uniform(lo, hi, n)


def _nonzero_mag(rng, n):
    # (0, BOX]; uniform(0, 1) never returns exactly 1 so 1 - u is in (0, 1]
    return BOX * (1.0 - rng.uniform(0.0, 1.0, n))


def same_sign(rng, n: int) -> LieBatch:
    """``b0, b1`` both strictly positive or both strictly negative."""
    s = np.where(rng.uniform(size=n) < 0.5, 1.0, -1.0)
    return LieBatch(_u(rng, n), s * _nonzero_mag(rng, n), _u(rng, n), s * _nonzero_mag(rng, n))


def zero_b(rng, n: int) -> LieBatch:
    """At least one of ``b0, b1`` is exactly zero, with the matching ``a`` negative."""
    which = rng.integers(0, 3, n)  # 0: b0 = 0, 1: b1 = 0, 2: both
    a0, b0, a1, b1 = _u(rng, n), _u(rng, n), _u(rng, n), _u(rng, n)
    z0 = which != 1
    z1 = which != 0
    b0[z0] = 0.0
    b1[z1] = 0.0
    a0[z0] = -_nonzero_mag(rng, int(z0.sum()))
    a1[z1] = -_nonzero_mag(rng, int(z1.sum()))
    return LieBatch(a0, b0, a1, b1)


def _ratios(batch: LieBatch):
    """``(lower, upper)`` bounds of the feasible interval for mixed-sign data."""
    pos0 = batch.b0 > 0
    r0 = -batch.a0 / batch.b0
    r1 = -batch.a1 / batch.b1
    return np.where(pos0, r1, r0), np.where(pos0, r0, r1)


def _orient(rng, ai, bi, aj, bj) -> LieBatch:
    """Randomly assign the positive coefficient to index 0 or 1."""
    flip = rng.uniform(size=ai.size) < 0.5
    return LieBatch(np.where(flip, aj, ai), np.where(flip, bj, bi), np.where(flip, ai, aj), np.where(flip, bi, bj))


def _mixed_uniform(rng, n):
    return _orient(rng, _u(rng, n), _nonzero_mag(rng, n), _u(rng, n), -_nonzero_mag(rng, n))


def mixed_compatible(rng, n: int, min_gap: float = 1e-9, tie_fraction: float = 0.25) -> LieBatch:
    """Opposite-sign ``b`` with ``upper - lower >= min_gap`` in floating point.

    Most samples come from uniform rejection; ``tie_fraction`` of them are
    engineered near-ties with a log-uniform gap in ``[min_gap, 1e-3]``.
    """
    n_tie = int(round(tie_fraction * n))
    parts = []
    need = n - n_tie
    while need > 0:
        b = _mixed_uniform(rng, 2 * need + 16)
        lo, hi = _ratios(b)
        keep = np.flatnonzero(hi - lo >= min_gap)[:need]
        parts.append(b.take(keep))
        need -= keep.size
    need = n_tie
    while need > 0:
        m = 2 * need + 16
        bi, bj = _nonzero_mag(rng, m), -_nonzero_mag(rng, m)
        aj = _u(rng, m)
        lo = -aj / bj
        gap = 10.0 ** rng.uniform(np.log10(min_gap), -3.0, m)
        ai = -(lo + gap) * bi
        b = _orient(rng, ai, bi, aj, bj)
        lo_c, hi_c = _ratios(b)
        keep = np.flatnonzero(hi_c - lo_c >= min_gap)[:need]
        parts.append(b.take(keep))
        need -= keep.size
    out = parts[0]
    for p in parts[1:]:
        out = out.concat(p)
    return out.take(rng.permutation(n))


def mixed_incompatible(rng, n: int, tie_fraction: float = 0.05) -> LieBatch:
    """Opposite-sign ``b`` with ``lower >= upper``; a few exact ties included."""
    parts = []
    need = n
    while need > 0:
        b = _mixed_uniform(rng, 2 * need + 16)
        lo, hi = _ratios(b)
        keep = np.flatnonzero(lo >= hi)[:need]
        parts.append(b.take(keep))
        need -= keep.size
    out = parts[0]
    for p in parts[1:]:
        out = out.concat(p)
    n_tie = int(round(tie_fraction * n))
    if n_tie:
        # exact ties: a_i = -r b_i and a_j = -r b_j with small integers, so both ratios equal r
        r = rng.integers(-5, 6, n_tie).astype(float)
        bi = rng.integers(1, 8, n_tie).astype(float)
        bj = -rng.integers(1, 8, n_tie).astype(float)
        ties = _orient(rng, -r * bi, bi, -r * bj, bj)
        out = LieBatch(*(np.concatenate([v[: n - n_tie], t]) for v, t in zip(out, ties)))
    return out.take(rng.permutation(n))


def uniform(rng, n: int, zero_fraction: float = 0.1) -> LieBatch:
    """Unconstrained draw with a sprinkle of exact zeros in ``b``."""
    a0, b0, a1, b1 = _u(rng, n), _u(rng, n), _u(rng, n), _u(rng, n)
    for a, b in ((a0, b0), (a1, b1)):
        z = rng.uniform(size=n) < zero_fraction
        b[z] = 0.0
        a[z] = -_nonzero_mag(rng, int(z.sum()))
    return LieBatch(a0, b0, a1, b1)


FAMILIES = {
    "same_sign": same_sign,
    "zero_b": zero_b,
    "mixed_compatible": mixed_compatible,
    "mixed_incompatible": mixed_incompatible,
    "uniform": uniform,
}
