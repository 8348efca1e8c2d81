"""The five-parameter bivariate pseudo-logistic model.

``X ~ Logistic(mu, sigma0)`` and ``Y | X = x ~ Logistic(alpha + beta*x, sigma1)``.
The joint density is the product of the two logistic factors, so the
log-likelihood splits into an X part in ``(mu, sigma0)`` and a Y part in
``(alpha, beta, sigma1)``.
"""

from __future__ import annotations

import math
from dataclasses import astuple, dataclass

import numpy as np

from . import kernels, logistic
from .data import PairedSample
from .errors import DomainError
from .logistic import VARIANCE_FACTOR, LogisticParams

__all__ = [
    "PARAM_NAMES", "PAPER_PARAMS", "ModelParams", "MomentSummary",
    "conditional_location", "joint_pdf", "joint_log_pdf", "gumbel_cdf",
    "moments", "correlation", "loglik", "score",
]

PARAM_NAMES = ("mu", "sigma0", "alpha", "beta", "sigma1")


@dataclass(frozen=True)
class ModelParams:
    mu: float
    sigma0: float
    alpha: float
    beta: float
    sigma1: float

    def __post_init__(self):
        for name in PARAM_NAMES:
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise DomainError(f"{name} must be finite, got {v!r}")
            object.__setattr__(self, name, v)
        if self.sigma0 <= 0.0 or self.sigma1 <= 0.0:
            raise DomainError(f"scales must be > 0, got sigma0={self.sigma0}, sigma1={self.sigma1}")

    @classmethod
    def from_array(cls, v) -> "ModelParams":
        return cls(*np.asarray(v, dtype=float).tolist())

    def to_array(self) -> np.ndarray:
        return np.array(astuple(self), dtype=float)

    def as_dict(self) -> dict[str, float]:
        return dict(zip(PARAM_NAMES, astuple(self)))

    @property
    def marginal(self) -> LogisticParams:
        return LogisticParams(self.mu, self.sigma0)

    def conditional(self, x: float) -> LogisticParams:
        return LogisticParams(conditional_location(self, x), self.sigma1)


#: Parameter values used throughout the simulation study and Figure-style plots.
PAPER_PARAMS = ModelParams(mu=2.0, sigma0=3.0, alpha=1.0, beta=3.0, sigma1=2.0)


@dataclass(frozen=True)
class MomentSummary:
    mean_x: float
    mean_y: float
    var_x: float
    var_y: float
    cov_xy: float
    rho: float


def conditional_location(p: ModelParams, x):
    """Regression function ``alpha + beta * x``."""
    return p.alpha + p.beta * x


def joint_log_pdf(p: ModelParams, x, y):
    x_arr = np.asarray(x, dtype=float)
    y_arr = np.asarray(y, dtype=float)
    if not (np.all(np.isfinite(x_arr)) and np.all(np.isfinite(y_arr))):
        raise DomainError("x and y must be finite")
    lx = logistic.log_pdf(x_arr, p.marginal)
    ly = logistic.log_pdf(y_arr - conditional_location(p, x_arr), LogisticParams(0.0, p.sigma1))
    return lx + ly


def joint_pdf(p: ModelParams, x, y):
    out = np.exp(joint_log_pdf(p, x, y))
    return float(out) if np.ndim(out) == 0 else out


def gumbel_cdf(x, y):
    """Gumbel's bivariate logistic distribution function ``1/(1 + e^-x + e^-y)``.

    Included for comparison only; it has no dependence parameter.
    """
    x_arr = np.asarray(x, dtype=float)
    y_arr = np.asarray(y, dtype=float)
    with np.errstate(over="ignore"):
        out = 1.0 / (1.0 + np.exp(-x_arr) + np.exp(-y_arr))
    return float(out) if np.ndim(out) == 0 else out


def correlation(p: ModelParams) -> float:
    return p.beta * p.sigma0 / math.sqrt(p.sigma1 ** 2 + (p.beta * p.sigma0) ** 2)


def moments(p: ModelParams) -> MomentSummary:
    var_x = VARIANCE_FACTOR * p.sigma0 ** 2
    return MomentSummary(
        mean_x=p.mu,
        mean_y=p.alpha + p.beta * p.mu,
        var_x=var_x,
        var_y=VARIANCE_FACTOR * (p.sigma1 ** 2 + p.beta ** 2 * p.sigma0 ** 2),
        cov_xy=p.beta * var_x,
        rho=correlation(p),
    )


def _check_sample(s: PairedSample):
    if s.n < 1:
        raise DomainError("sample is empty")


def loglik(p: ModelParams, s: PairedSample) -> float:
    _check_sample(s)
    return float(kernels.loglik(s.xs, s.ys, p.mu, p.sigma0, p.alpha, p.beta, p.sigma1))


def loglik_and_score(p: ModelParams, s: PairedSample) -> tuple[float, np.ndarray]:
    _check_sample(s)
    ll, g = kernels.loglik_grad(s.xs, s.ys, p.mu, p.sigma0, p.alpha, p.beta, p.sigma1)
    return float(ll), g


def score(p: ModelParams, s: PairedSample) -> np.ndarray:
    """Gradient of :func:`loglik` in ``(mu, sigma0, alpha, beta, sigma1)``.

    These are raw partial derivatives, not the rearranged fixed-point forms;
    their common root is the same.
    """
    return loglik_and_score(p, s)[1]
