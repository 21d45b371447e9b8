"""Equality-constrained indefinite least squares: direct solution through
the augmented system and certified linearized backward-error estimation.
"""

from .core import (
    BackwardErrorReport,
    GenerationError,
    IllPosedProblemError,
    IlseError,
    IlseProblem,
    IlseSolution,
    OptimizationError,
    PerturbationQuadruple,
    RankDeficiencyError,
    SignatureMatrix,
    WeightScheme,
    apply_signature,
    perturbed_problem,
    weighted_perturbation_norm,
)
from .solver import (
    WellPosednessReport,
    assemble_augmented,
    check_well_posedness,
    normal_equation_residuals,
    solve_ilse,
)
from .backward_error import (
    LinearizationOperator,
    backward_error_bounds,
    backward_error_estimate,
    least_squares_multiplier,
    linearization_matrix,
    linearization_pinv_norm,
    min_norm_perturbation,
    pinv_norm_bound,
    rhs_vector,
    solution_distance_lower_bound,
    stability_constant,
    stability_constant_lower_bound,
)
from .oracle import (
    MinimizeResult,
    estimate_gradient_fd,
    estimate_on_grid,
    estimate_via_normal_equations,
    minimize_estimate,
    pinv_norm_bound_via_svd,
)
from .testgen import (
    GenParams,
    gen_conditioned_matrix,
    gen_geometric_diagonal,
    gen_ilse_instance,
    gen_perturbation,
    gen_random_orthogonal,
    gen_sigma_orthogonal,
)
from .harness import (
    ExperimentConfig,
    ExperimentRow,
    VerifyReport,
    format_rows,
    mu_one,
    parse_experiment_csv,
    read_problem,
    residual_gamma,
    run_experiment,
    run_trial,
    verify_suite,
    write_problem,
)

__version__ = "0.1.0"

__all__ = [
    "BackwardErrorReport",
    "ExperimentConfig",
    "ExperimentRow",
    "GenParams",
    "GenerationError",
    "IllPosedProblemError",
    "IlseError",
    "IlseProblem",
    "IlseSolution",
    "LinearizationOperator",
    "MinimizeResult",
    "OptimizationError",
    "PerturbationQuadruple",
    "RankDeficiencyError",
    "SignatureMatrix",
    "VerifyReport",
    "WeightScheme",
    "WellPosednessReport",
    "apply_signature",
    "assemble_augmented",
    "backward_error_bounds",
    "backward_error_estimate",
    "check_well_posedness",
    "estimate_gradient_fd",
    "estimate_on_grid",
    "estimate_via_normal_equations",
    "format_rows",
    "gen_conditioned_matrix",
    "gen_geometric_diagonal",
    "gen_ilse_instance",
    "gen_perturbation",
    "gen_random_orthogonal",
    "gen_sigma_orthogonal",
    "least_squares_multiplier",
    "linearization_matrix",
    "linearization_pinv_norm",
    "min_norm_perturbation",
    "minimize_estimate",
    "mu_one",
    "normal_equation_residuals",
    "parse_experiment_csv",
    "perturbed_problem",
    "pinv_norm_bound",
    "pinv_norm_bound_via_svd",
    "read_problem",
    "residual_gamma",
    "rhs_vector",
    "run_experiment",
    "run_trial",
    "solution_distance_lower_bound",
    "solve_ilse",
    "stability_constant",
    "stability_constant_lower_bound",
    "verify_suite",
    "weighted_perturbation_norm",
    "write_problem",
]
