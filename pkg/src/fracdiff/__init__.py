"""Spectral solver and exponent identification for double-fractional diffusion.

The forward problem is a one-dimensional diffusion on (-1, 1) whose spatial
generator is the sum of two fractional Laplacians of orders alpha1 and alpha2
and whose time derivative is a Caputo derivative of order beta.  The solution
is expanded in the eigenbasis of the discretized generator, with time factors
given by the Mittag-Leffler function.  The inverse problem recovers the three
exponents from the solution observed at the origin, and the landscape tools
quantify how flat (and therefore how ill-posed) that recovery is in the two
spatial orders.
"""

from .errors import (
    BoundaryStallError,
    ConvergenceError,
    DomainError,
    FracdiffError,
    InputFormatError,
)
from .forward_model import (
    ForwardModel,
    InitialCondition,
    OriginSolver,
    ParameterVector,
    Trajectory,
    build_forward_model,
    default_initial_condition,
    evaluate_solution,
    evaluate_trajectory,
    load_trajectory,
    project_initial_condition,
    write_trajectory_csv,
    write_trajectory_json,
)
from .inversion import (
    CostConfig,
    FitReport,
    OptimizerConfig,
    cost,
    fit,
    jacobian_fd,
    make_cost_config,
    residuals,
    simpson_weights,
    write_fit_report,
    write_residuals_csv,
)
from .landscape import (
    Axis,
    SweepResult,
    SweepSpec,
    ThresholdSet,
    beta_sensitivity,
    default_pane_spec,
    load_sweep_json,
    sublevel_set,
    sweep,
    write_deviations_csv,
    write_sweep_csv,
    write_sweep_json,
    write_threshold_set_json,
)
from .mittag_leffler import mlf, mlf_decay_bound_holds, mlf_neg_batch
from .oracles import (
    McForwardConfig,
    StableSamplerConfig,
    caputo_l1,
    mc_forward_solution,
    sample_inverse_stable_subordinator,
    sample_symmetric_stable,
    write_oracle_report,
)
from .spectral_operator import (
    Grid1D,
    OperatorMatrix,
    SpectralDecomposition,
    build_operator_matrix,
    build_single_alpha_matrix,
    cache_key,
    cached_eigendecompose,
    eigendecompose,
    load_decomposition,
    save_decomposition,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "Axis",
    "BoundaryStallError",
    "ConvergenceError",
    "CostConfig",
    "DomainError",
    "FitReport",
    "ForwardModel",
    "FracdiffError",
    "Grid1D",
    "InitialCondition",
    "InputFormatError",
    "McForwardConfig",
    "OperatorMatrix",
    "OptimizerConfig",
    "OriginSolver",
    "ParameterVector",
    "SpectralDecomposition",
    "StableSamplerConfig",
    "SweepResult",
    "SweepSpec",
    "ThresholdSet",
    "Trajectory",
    "beta_sensitivity",
    "build_forward_model",
    "build_operator_matrix",
    "build_single_alpha_matrix",
    "cache_key",
    "cached_eigendecompose",
    "caputo_l1",
    "cost",
    "default_initial_condition",
    "default_pane_spec",
    "eigendecompose",
    "evaluate_solution",
    "evaluate_trajectory",
    "fit",
    "jacobian_fd",
    "load_decomposition",
    "load_sweep_json",
    "load_trajectory",
    "make_cost_config",
    "mc_forward_solution",
    "mlf",
    "mlf_decay_bound_holds",
    "mlf_neg_batch",
    "project_initial_condition",
    "residuals",
    "sample_inverse_stable_subordinator",
    "sample_symmetric_stable",
    "simpson_weights",
    "sublevel_set",
    "sweep",
    "write_deviations_csv",
    "write_fit_report",
    "write_oracle_report",
    "write_residuals_csv",
    "write_sweep_csv",
    "write_sweep_json",
    "write_threshold_set_json",
    "write_trajectory_csv",
    "write_trajectory_json",
]
