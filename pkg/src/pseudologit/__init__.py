"""Bivariate pseudo-logistic distribution.

``X ~ Logistic(mu, sigma0)`` with ``Y | X = x ~ Logistic(alpha + beta x, sigma1)``:
densities and moments, sampling, method-of-moments and maximum-likelihood
fitting, likelihood-ratio tests of nested sub-models, Wald and bootstrap
intervals, and a Monte Carlo study harness.
"""

__version__ = "0.1.0"

from .data import PairedSample, summarize
from .errors import (
    BootstrapFailureError,
    ConvergenceError,
    DegenerateSampleError,
    DomainError,
    NonPositiveScaleError,
    OptimizerInconsistencyError,
    PseudoLogitError,
    SingularInformationError,
)
from .estimation import (
    FitMethod,
    FitResult,
    SolverOptions,
    fit_mle,
    fit_mle_paper_hybrid,
    method_of_moments,
    observed_information,
    standard_errors,
)
from .inference import (
    ConfidenceInterval,
    LrtResult,
    SubModel,
    bootstrap,
    chi2_survival,
    fit_restricted,
    lrt,
    wald_ci,
)
from .logistic import LogisticParams
from .model import (
    PAPER_PARAMS,
    ModelParams,
    MomentSummary,
    conditional_location,
    correlation,
    gumbel_cdf,
    joint_log_pdf,
    joint_pdf,
    loglik,
    moments,
    score,
)
from .rng import RandomStream
from .simulation import (
    StudyConfig,
    StudyReport,
    density_grid,
    pearson_correlation,
    run_study,
    sample_dataset,
    sample_pair,
)

__all__ = [
    "__version__",
    "PairedSample", "summarize",
    "BootstrapFailureError", "ConvergenceError", "DegenerateSampleError", "DomainError",
    "NonPositiveScaleError", "OptimizerInconsistencyError", "PseudoLogitError",
    "SingularInformationError",
    "FitMethod", "FitResult", "SolverOptions", "fit_mle", "fit_mle_paper_hybrid",
    "method_of_moments", "observed_information", "standard_errors",
    "ConfidenceInterval", "LrtResult", "SubModel", "bootstrap", "chi2_survival",
    "fit_restricted", "lrt", "wald_ci",
    "LogisticParams",
    "PAPER_PARAMS", "ModelParams", "MomentSummary", "conditional_location", "correlation",
    "gumbel_cdf", "joint_log_pdf", "joint_pdf", "loglik", "moments", "score",
    "RandomStream",
    "StudyConfig", "StudyReport", "density_grid", "pearson_correlation", "run_study",
    "sample_dataset", "sample_pair",
]
