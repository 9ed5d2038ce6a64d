"""Deterministic grid search for an initial state that shows the conflict.

A grid point qualifies when the CLF-only Sontag law leaves the safe set and
the chosen safety-prioritizing law runs through the compatible ->
incompatible -> compatible mode pattern. Points are visited in
lexicographic order (x1 outer, x2 inner) and the first qualifying one wins.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .plant import SystemBundle
from .simulate import ControllerSpec, Law, SimOptions, mode_pattern, simulate

__all__ = ["GridSpec", "SearchResult", "TARGET_PATTERN", "grid_points", "find_x0"]

TARGET_PATTERN = (1, 0, 1)


@dataclass(frozen=True)
class GridSpec:
    x1_min: float = -3.0
    x1_max: float = 3.0
    x2_min: float = -3.0
    x2_max: float = 3.0
    step: float = 0.25


@dataclass
class SearchResult:
    x0: tuple | None
    baseline_min_h: float | None = None
    min_h: float | None = None
    pattern: tuple = ()
    transitions: list = field(default_factory=list)
    visited: int = 0
    simulated: int = 0

    @property
    def found(self) -> bool:
        return self.x0 is not None


def _axis(lo: float, hi: float, step: float) -> np.ndarray:
    if not step > 0 or hi < lo:
        return np.empty(0)
    count = int(np.floor((hi - lo) / step + 1e-9)) + 1
    # integer multiples avoid accumulating drift along the axis
    return lo + step * np.arange(count)


def grid_points(spec: GridSpec):
    """Yield grid states in lexicographic order."""
    for x1 in _axis(spec.x1_min, spec.x1_max, spec.step):
        for x2 in _axis(spec.x2_min, spec.x2_max, spec.step):
            yield (float(x1), float(x2))


def find_x0(bundle: SystemBundle, spec: GridSpec = GridSpec(), ctrl: ControllerSpec | None = None,
            dt: float = 1e-3, t_end: float = 10.0) -> SearchResult:
    ctrl = ctrl if ctrl is not None else ControllerSpec(Law.KL_SHARP)
    baseline = ControllerSpec(Law.CLF_ONLY_SONTAG, blend=ctrl.blend, c=ctrl.c)
    # abort as soon as the baseline leaves the safe set: that alone settles (a)
    base_opts = SimOptions(dt=dt, t_end=t_end, h_abort=0.0, abort_on_violation=True)
    opts = SimOptions(dt=dt, t_end=t_end)
    visited = simulated = 0
    for x0 in grid_points(spec):
        visited += 1
        if not bundle.h(np.array(x0)) > 0:
            continue
        _, base = simulate(bundle, baseline, x0, options=base_opts)
        simulated += 1
        if not base.safety_violated:
            continue
        _, rep = simulate(bundle, ctrl, x0, options=opts)
        simulated += 1
        pattern = mode_pattern(rep.mode_transitions)
        if pattern == TARGET_PATTERN:
            return SearchResult(x0, base.min_h, rep.min_h, pattern, rep.mode_transitions, visited, simulated)
    return SearchResult(None, visited=visited, simulated=simulated)
