"""Population dynamics of egg hatching regulated by larval density.

A planar egg/larva model (plus its three- and four-stage lifts) where
the hatching rate responds to the larval density.  The package finds
steady states, locates the oscillation onset with its normal form,
constructs singular relaxation cycles, integrates trajectories and runs
parameter sweeps.
"""

from .hatch import (Arctan, Constant, HatchFunction, Hill, InverseHill, Step,
                    hatch_from_dict, hatch_to_dict)
from .params import (ReducedParams, StageParams, ThreeStageParams,
                     reduce_stage_params)
from .model import AssumptionReport, check_assumptions, make_rhs, rhs
from .equilibria import (Equilibrium, StabilityThresholds, calibrate_c,
                         classify, find_steady_states, lift_equilibrium_4d,
                         metzler_stability_4d, steady_state_residual,
                         thresholds, uniqueness_sufficient)
from .hopf import (HopfPoint, bifurcation_point, find_a_tilde,
                   hatch_from_k_kprime, k_from_period,
                   normal_form_coefficient, omega_at_bifurcation)
from .slowfast import (NO_RELAXATION, NoRelaxation, ScaledSystem,
                       SlowFastCycle, StepLimitResult, build_cycle,
                       hill_amplitude, limit_fg, phi_extrema, project_pi,
                       scaled_system, step_limit)
from .sim import (IntegrationError, OscillationMetrics, Trajectory,
                  integrate, measure_oscillation)
from .sweep import (J_DEFAULT, ArctanGrid, CellResult, HillGrid, SimSettings,
                    SweepResult, SweepSpec, arctan_grid, hill_grid, run_sweep,
                    worker_count)
from .config import (ConfigError, RunConfig, load_config, parse_grid,
                     parse_hatch, parse_model, parse_sim)

__version__ = "0.1.0"

__all__ = [
    "Arctan", "Constant", "HatchFunction", "Hill", "InverseHill", "Step",
    "hatch_from_dict", "hatch_to_dict",
    "ReducedParams", "StageParams", "ThreeStageParams", "reduce_stage_params",
    "AssumptionReport", "check_assumptions", "make_rhs", "rhs",
    "Equilibrium", "StabilityThresholds", "calibrate_c", "classify",
    "find_steady_states", "lift_equilibrium_4d", "metzler_stability_4d",
    "steady_state_residual", "thresholds", "uniqueness_sufficient",
    "HopfPoint", "bifurcation_point", "find_a_tilde", "hatch_from_k_kprime",
    "k_from_period", "normal_form_coefficient", "omega_at_bifurcation",
    "NO_RELAXATION", "NoRelaxation", "ScaledSystem", "SlowFastCycle",
    "StepLimitResult",
    "build_cycle", "hill_amplitude", "limit_fg", "phi_extrema", "project_pi",
    "scaled_system", "step_limit",
    "IntegrationError", "OscillationMetrics", "Trajectory", "integrate",
    "measure_oscillation",
    "J_DEFAULT", "ArctanGrid", "CellResult", "HillGrid", "SimSettings",
    "SweepResult", "SweepSpec", "arctan_grid", "hill_grid", "run_sweep",
    "worker_count",
    "ConfigError", "RunConfig", "load_config", "parse_grid", "parse_hatch",
    "parse_model", "parse_sim",
    "__version__",
]
