"""Point-null and peri-null Bayes factors for the Bayesian t-test.

The package computes marginal likelihoods and Bayes factors through the
t-statistic reduction, provides the higher-order Laplace expansion machinery
(Taylor tensors, Gaussian moment tensors, correction coefficients), the
closed-form asymptotic theory of the peri-null Bayes factor (limits,
sampling distributions, bias terms), and a reproducible Monte Carlo harness
for the sampling-distribution curves.
"""

from .core import (
    AltCauchy,
    BFResult,
    Design,
    ParamPoint,
    PeriNullNormal,
    PeriPointMixture,
    PointAtZero,
    PriorSpec,
    ShrinkingPeriNull,
    SummaryStats,
    TruncatedCauchy,
    ingest_one_sample,
    ingest_two_sample,
)
from .engine import (
    DEFAULT_QUADRATURE,
    QuadratureConfig,
    interval_null_bf,
    marginal_loglik,
    peri_null_bf,
    peri_null_correction_bf,
    peri_point_bf,
    point_null_bf10,
    shrinking_peri_null_bf,
)
from .errors import (
    DegeneratePriorError,
    InvalidInputError,
    PeriNullError,
    QuadratureConvergenceError,
    SimulationError,
    UnsupportedOrderError,
)
from .isserlis import MomentTable, isserlis_moment, pair_partition_count, pair_partitions
from .laplace import (
    FiniteDifferenceResult,
    LaplaceExpansion,
    TensorCoeffs,
    finite_difference_derivatives,
    laplace_c1,
    laplace_c2,
    laplace_marginal,
)
from .nct import central_t_logpdf, noncentral_t_logpdf
from .asymptotics import (
    AsymptoticSummary,
    BiasTerm,
    CConstants,
    LogBfDistribution,
    Regime,
    asymptotic_variance,
    bias_term,
    c_constants,
    limit_gradient_hessian,
    limit_log_bf,
    sampling_distribution,
    summarize,
)
from .simulate import (
    CellSummary,
    OverlayPoint,
    SimConfig,
    SimResult,
    Variant,
    detect_crossing,
    overlay_asymptotics,
    run_simulation,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # core
    "Design", "SummaryStats", "ParamPoint", "PriorSpec", "PointAtZero",
    "PeriNullNormal", "AltCauchy", "TruncatedCauchy", "PeriPointMixture",
    "ShrinkingPeriNull", "BFResult", "ingest_one_sample", "ingest_two_sample",
    # engine
    "QuadratureConfig", "DEFAULT_QUADRATURE", "marginal_loglik",
    "point_null_bf10", "peri_null_correction_bf", "peri_null_bf",
    "interval_null_bf", "peri_point_bf", "shrinking_peri_null_bf",
    # density
    "noncentral_t_logpdf", "central_t_logpdf",
    # laplace
    "pair_partitions", "pair_partition_count", "isserlis_moment", "MomentTable",
    "TensorCoeffs", "LaplaceExpansion", "laplace_c1", "laplace_c2",
    "laplace_marginal", "finite_difference_derivatives", "FiniteDifferenceResult",
    # asymptotics
    "Regime", "CConstants", "BiasTerm", "LogBfDistribution", "AsymptoticSummary",
    "limit_log_bf", "limit_gradient_hessian", "asymptotic_variance",
    "c_constants", "bias_term", "sampling_distribution", "summarize",
    # simulation
    "Variant", "SimConfig", "CellSummary", "OverlayPoint", "SimResult",
    "run_simulation", "overlay_asymptotics", "detect_crossing",
    # errors
    "PeriNullError", "InvalidInputError", "DegeneratePriorError",
    "UnsupportedOrderError", "QuadratureConvergenceError", "SimulationError",
]
