"""Closed-form CLF/CBF feedback for control-affine plants with one input.

The laws meet a CLF decrease condition and a CBF safety condition at once
wherever the two are compatible, and keep safety where they are not. No
optimization problem is solved online.
"""

from .blend import BlendConfig, LambdaKind, compatible, delta, k_l, k_m, lambda_eval, split_indices
from .errors import DomainError, EvaluationError, InconsistencyError, IntegrationError, SafeStabError
from .feasibility import FeasibleSet, SetKind, check, feasible_set, grid_search
from .formulas import FormulaKind, phi_freeman, phi_sontag, smooth_max, smooth_max0, smooth_min, universal
from .plant import (
    CbfSpec,
    ClfSpec,
    Dynamics,
    LieData,
    SystemBundle,
    fd_gradient,
    lie_data,
    planar_example,
)
from .priority import (
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
from .simulate import ControllerSpec, Law, SimOptions, mode_transitions, rk4_step, simulate

__version__ = "0.1.0"
