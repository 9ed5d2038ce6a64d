"""Closed-loop simulation with fixed-step RK4 and zero-order-hold control.

At every sample the controller sees the Lie data of the current state; the
same data give the recorded mode and residuals, so the trajectory shows
exactly what the controller acted on.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .blend import BlendConfig, k_l, k_m
from .errors import DomainError, EvaluationError, IntegrationError, SafeStabError
from .formulas import phi_freeman, phi_sontag
from .plant import Dynamics, LieData, SystemBundle, as_state, lie_data
from .priority import (
    DEFAULT_C,
    Mode,
    SafetyPriorityConfig,
    k_l_sharp,
    k_l_star,
    k_m_sharp,
    k_m_star,
    min_norm_baseline,
    mode,
)

__all__ = [
    "Law",
    "PROPOSED_LAWS",
    "ControllerSpec",
    "SimOptions",
    "Trajectory",
    "SimReport",
    "rk4_step",
    "simulate",
    "mode_transitions",
    "mode_pattern",
    "step_count",
    "KERNEL_LAWS",
]


class Law(str, enum.Enum):
    KL = "kl"
    KM = "km"
    KL_STAR = "kl_star"
    KM_STAR = "km_star"
    KL_SHARP = "kl_sharp"
    KM_SHARP = "km_sharp"
    CLF_ONLY_SONTAG = "clf_only_sontag"
    CLF_ONLY_FREEMAN = "clf_only_freeman"
    MIN_NORM_BASELINE = "min_norm_baseline"


PROPOSED_LAWS = (Law.KL_STAR, Law.KM_STAR, Law.KL_SHARP, Law.KM_SHARP)


@dataclass(frozen=True)
class ControllerSpec:
    """A feedback law plus its tuning; ``c`` only matters for the sharp laws."""

    law: Law = Law.KL_SHARP
    blend: BlendConfig = field(default_factory=BlendConfig)
    c: float = DEFAULT_C

    def __post_init__(self):
        object.__setattr__(self, "law", Law(self.law))
        if not self.c > 0:
            raise DomainError(f"c must be positive, got {self.c!r}")

    def __call__(self, d: LieData, x) -> float:
        law = self.law
        if law is Law.KL:
            return k_l(d, self.blend)
        if law is Law.KM:
            return k_m(d, self.blend)
        if law is Law.KL_STAR:
            return k_l_star(d, self.blend)
        if law is Law.KM_STAR:
            return k_m_star(d, self.blend)
        if law is Law.KL_SHARP:
            return k_l_sharp(d, x, SafetyPriorityConfig(self.blend, self.c))
        if law is Law.KM_SHARP:
            return k_m_sharp(d, x, SafetyPriorityConfig(self.blend, self.c))
        if law is Law.CLF_ONLY_SONTAG:
            return phi_sontag(d.a0, d.b0)
        if law is Law.CLF_ONLY_FREEMAN:
            return phi_freeman(d.a0, d.b0)
        return min_norm_baseline(d)


@dataclass(frozen=True)
class SimOptions:
    dt: float = 1e-3
    t_end: float = 10.0
    stop_tol: float = 1e-6
    h_abort: float = 1.0
    abort_on_violation: bool = False
    converge_tol: float = 1e-3

    def __post_init__(self):
        if not (self.dt > 0 and self.t_end > 0):
            raise DomainError("dt and t_end must be positive")
        if self.dt > self.t_end:
            raise DomainError("dt must not exceed t_end")


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    inputs: np.ndarray
    V_vals: np.ndarray
    h_vals: np.ndarray
    modes: np.ndarray
    F0_vals: np.ndarray
    F1_vals: np.ndarray

    def __len__(self):
        return self.times.size


@dataclass
class SimReport:
    min_h: float
    safety_violated: bool
    final_state_norm: float
    converged: bool
    mode_transitions: list
    steps: int
    stop_reason: str
    abort_time: float | None = None

    def summary(self) -> dict:
        return {
            "min_h": self.min_h,
            "safety_violated": int(self.safety_violated),
            "final_state_norm": self.final_state_norm,
            "converged": int(self.converged),
            "stop_reason": self.stop_reason,
            "steps": self.steps,
            "mode_pattern": "->".join(str(int(m)) for _, m in self.mode_transitions),
            "mode_transitions": ";".join(f"{t:.17g}:{int(m)}" for t, m in self.mode_transitions),
        }


def step_count(dt: float, t_end: float) -> int:
    """Number of integration steps; the trajectory has one more sample."""
    # the tiny slack absorbs representation error in t_end/dt, e.g. 10/1e-3
    return int(math.floor(t_end / dt + 1e-9))


def rk4_step(dyn: Dynamics, x: np.ndarray, u: float, dt: float, step: int | None = None) -> np.ndarray:
    if not dt > 0:
        raise DomainError(f"dt must be positive, got {dt!r}")
    k1 = dyn.rhs(x, u)
    k2 = dyn.rhs(x + 0.5 * dt * k1, u)
    k3 = dyn.rhs(x + 0.5 * dt * k2, u)
    k4 = dyn.rhs(x + dt * k3, u)
    x_new = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not np.all(np.isfinite(x_new)):
        raise IntegrationError(f"non-finite state after step {step}", step=step, state=x_new)
    return x_new


def mode_transitions(traj: Trajectory) -> list:
    """Run-length encoding of the mode sequence as ``(start_time, Mode)`` pairs."""
    if len(traj) == 0:
        raise DomainError("empty trajectory")
    modes = np.asarray(traj.modes)
    starts = np.flatnonzero(np.diff(modes) != 0) + 1
    idx = np.concatenate(([0], starts))
    return [(float(traj.times[k]), Mode(int(modes[k]))) for k in idx]


def mode_pattern(transitions) -> tuple:
    return tuple(int(m) for _, m in transitions)


KERNEL_LAWS = frozenset(law for law in Law if law is not Law.MIN_NORM_BASELINE)


def _kernel_applicable(bundle: SystemBundle, ctrl: ControllerSpec) -> bool:
    return bundle.builtin == "planar_example" and ctrl.law in KERNEL_LAWS


def _finish(traj: Trajectory, stop_reason: str, abort_time, opts: SimOptions):
    min_h = float(np.min(traj.h_vals))
    final_norm = float(np.linalg.norm(traj.states[-1]))
    return SimReport(
        min_h=min_h,
        safety_violated=min_h < 0.0,
        final_state_norm=final_norm,
        converged=stop_reason != "diverged" and final_norm < opts.converge_tol,
        mode_transitions=mode_transitions(traj),
        steps=len(traj) - 1,
        stop_reason=stop_reason,
        abort_time=abort_time,
    )


def _simulate_kernel(bundle: SystemBundle, ctrl: ControllerSpec, x: np.ndarray, opts: SimOptions):
    blend = ctrl.blend
    cols, stop_reason = kernels.simulate_example(
        dict(bundle.params), x[0], x[1], law=ctrl.law.value, formula=blend.formula.value,
        lambda_kind=blend.lambda_kind.value, eta=blend.eta, c=ctrl.c, dt=opts.dt,
        steps=step_count(opts.dt, opts.t_end), stop_tol=opts.stop_tol, h_abort=opts.h_abort,
        abort_on_violation=opts.abort_on_violation,
    )
    if stop_reason in ("undefined", "nonfinite"):
        t = cols.shape[0] * opts.dt
        if stop_reason == "nonfinite":
            raise EvaluationError(f"t={t:.17g}: non-finite Lie data", field="lie_data")
        raise DomainError(f"t={t:.17g}: {ctrl.law.value} is undefined at the current state")
    traj = Trajectory(cols[:, 0].copy(), cols[:, 1:3].copy(), cols[:, 3].copy(), cols[:, 4].copy(),
                      cols[:, 5].copy(), cols[:, 6].astype(np.int8), cols[:, 7].copy(), cols[:, 8].copy())
    below = np.flatnonzero(traj.h_vals < -opts.h_abort)
    abort_time = float(traj.times[below[0]]) if below.size else None
    return traj, _finish(traj, stop_reason, abort_time, opts)


def simulate(bundle: SystemBundle, ctrl: ControllerSpec, x0, dt: float = 1e-3, t_end: float = 10.0,
             options: SimOptions | None = None, engine: str = "auto"):
    """Integrate the closed loop from ``x0``; returns ``(Trajectory, SimReport)``.

    ``options`` overrides ``dt``/``t_end`` when given. ``engine`` is
    ``"generic"`` (any bundle, Python loop over the field handles),
    ``"kernel"`` (builtin example only, batch kernel loop) or ``"auto"``,
    which picks the kernel whenever it applies. Controller failures are
    re-raised with the sample time prepended to the message.
    """
    opts = options if options is not None else SimOptions(dt=dt, t_end=t_end)
    n = bundle.n
    x = as_state(x0, n)
    if engine not in ("auto", "generic", "kernel"):
        raise DomainError(f"unknown engine {engine!r}")
    if engine == "kernel" and not _kernel_applicable(bundle, ctrl):
        raise DomainError("the kernel engine covers the builtin example without the min-norm baseline")
    if engine != "generic" and _kernel_applicable(bundle, ctrl):
        return _simulate_kernel(bundle, ctrl, x, opts)

    dt = opts.dt
    N = step_count(dt, opts.t_end)

    times = np.empty(N + 1)
    states = np.empty((N + 1, n))
    inputs = np.empty(N + 1)
    V_vals = np.empty(N + 1)
    h_vals = np.empty(N + 1)
    modes = np.empty(N + 1, dtype=np.int8)
    F0 = np.empty(N + 1)
    F1 = np.empty(N + 1)

    stop_reason = "t_end"
    abort_time = None
    k = 0
    while True:
        t = k * dt
        try:
            d = lie_data(bundle, x)
            u = float(ctrl(d, x))
        except SafeStabError as exc:
            exc.args = (f"t={t:.17g}: {exc.args[0] if exc.args else exc}",) + exc.args[1:]
            raise
        times[k] = t
        states[k] = x
        inputs[k] = u
        V_vals[k] = bundle.V(x)
        h_vals[k] = hk = bundle.h(x)
        modes[k] = int(mode(d))
        F0[k] = d.a0 + d.b0 * u
        F1[k] = d.a1 + d.b1 * u

        if float(np.linalg.norm(x)) < opts.stop_tol:
            stop_reason = "converged"
            break
        if hk < -opts.h_abort and abort_time is None:
            abort_time = t
            if opts.abort_on_violation:
                stop_reason = "safety_abort"
                break
        if k == N:
            break
        try:
            x = rk4_step(bundle.dynamics, x, u, dt, step=k)
        except IntegrationError:
            stop_reason = "diverged"
            break
        k += 1

    m = k + 1
    traj = Trajectory(times[:m], states[:m], inputs[:m], V_vals[:m], h_vals[:m], modes[:m], F0[:m], F1[:m])
    return traj, _finish(traj, stop_reason, abort_time, opts)
