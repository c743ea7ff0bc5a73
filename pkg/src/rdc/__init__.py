"""Rate-distortion analysis for discrete two-class mixture sources.

Computes the minimum achievable rate (mutual information, in bits) under a
joint distortion bound and a classification-error bound, via alternating
minimization with nested multiplier bisection. Includes a closed-form binary
baseline, a brute-force grid oracle for validation, and grid-level checks of
monotonicity and convexity.
"""

from .source import (
    Channel,
    DistortionMeasure,
    MixtureSource,
    SourceSpec,
    expected_distortion,
    load_source_spec,
    marginal,
    propagate,
)
from .info import binary_entropy, entropy, mutual_information
from .classify import (
    BinaryClassifier,
    ErrorWeightMatrix,
    bayes_region,
    error_rate,
    weight_matrix,
)
from .solver import (
    InfeasibleBounds,
    RdcPoint,
    SolverConfig,
    solve_constrained,
    solve_lagrangian,
    sweep_surface,
)
from .oracle import OracleConfig, OracleResult, grid_search_rdc
from .bernoulli import (
    BernoulliRegimes,
    PlateauNotFound,
    locate_regimes,
    rd_closed_form,
)
from .surface import RdcSurface, check_convexity, check_monotone, export_surface, read_surface

__version__ = "0.1.0"

__all__ = [
    "BernoulliRegimes",
    "BinaryClassifier",
    "Channel",
    "DistortionMeasure",
    "ErrorWeightMatrix",
    "InfeasibleBounds",
    "MixtureSource",
    "OracleConfig",
    "OracleResult",
    "PlateauNotFound",
    "RdcPoint",
    "RdcSurface",
    "SolverConfig",
    "SourceSpec",
    "bayes_region",
    "binary_entropy",
    "check_convexity",
    "check_monotone",
    "entropy",
    "error_rate",
    "expected_distortion",
    "export_surface",
    "grid_search_rdc",
    "load_source_spec",
    "locate_regimes",
    "marginal",
    "mutual_information",
    "propagate",
    "rd_closed_form",
    "read_surface",
    "solve_constrained",
    "solve_lagrangian",
    "sweep_surface",
    "weight_matrix",
]
