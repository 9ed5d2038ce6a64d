"""CSV emission and parsing for trajectories and compatibility sweeps.

Floats are written with 17 significant digits, which round-trips every
double exactly; modes and flags are written as integers.
"""

from __future__ import annotations

import csv
import io

import numpy as np

from .simulate import Trajectory

__all__ = ["trajectory_header", "trajectory_csv", "read_trajectory_csv", "SWEEP_HEADER", "sweep_csv"]

SWEEP_HEADER = ("x1", "x2", "compatible", "mode", "b0", "b1", "feasible_lo", "feasible_hi", "kind")


def _g(v: float) -> str:
    return "%.17g" % v


def trajectory_header(n: int) -> list:
    return ["t"] + [f"x{k + 1}" for k in range(n)] + ["u", "V", "h", "mode", "F0", "F1"]


def trajectory_csv(traj: Trajectory) -> str:
    n = traj.states.shape[1]
    lines = [",".join(trajectory_header(n))]
    for k in range(len(traj)):
        row = [_g(traj.times[k])]
        row += [_g(v) for v in traj.states[k]]
        row += [_g(traj.inputs[k]), _g(traj.V_vals[k]), _g(traj.h_vals[k]), str(int(traj.modes[k])),
                _g(traj.F0_vals[k]), _g(traj.F1_vals[k])]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def read_trajectory_csv(text: str):
    """Parse :func:`trajectory_csv` output into ``(header, float array)``."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    rows = [[float(v) for v in row] for row in reader if row]
    return header, np.array(rows, dtype=float).reshape(len(rows), len(header))


def sweep_csv(rows) -> str:
    """``rows`` yields tuples in :data:`SWEEP_HEADER` order."""
    lines = [",".join(SWEEP_HEADER)]
    for x1, x2, compat, mode, b0, b1, lo, hi, kind in rows:
        lines.append(",".join([_g(x1), _g(x2), str(int(compat)), str(int(mode)), _g(b0), _g(b1),
                               _g(lo), _g(hi), kind]))
    return "\n".join(lines) + "\n"
