"""Likelihood-ratio tests for the nested sub-models, Wald and bootstrap intervals."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from ._parallel import ordered_map
from .data import PairedSample
from .errors import BootstrapFailureError, DomainError, OptimizerInconsistencyError, PseudoLogitError
from .estimation import (
    FULL_MODEL,
    FitMethod,
    FitResult,
    Parametrization,
    SolverOptions,
    attach_standard_errors,
    check_identifiable,
    default_init,
    fit_mle,
    quasi_newton,
)
from .model import ModelParams
from .rng import RandomStream
from .special import chi2_survival, norm_ppf

__all__ = [
    "SubModel", "LrtResult", "ConfidenceInterval", "BootstrapResult",
    "fit_restricted", "lrt", "chi2_survival", "wald_ci", "wald_intervals", "bootstrap",
    "NESTING_SLACK",
]

#: restricted loglik may exceed the unrestricted one by this much before it is an error
NESTING_SLACK = 1e-6


class SubModel(str, enum.Enum):
    """Nested hypotheses, each one equality constraint on the full model."""

    EQUAL_SCALES = "equal-scales"
    UNIT_MARGINAL_SCALE = "sigma0-one"
    UNIT_CONDITIONAL_SCALE = "sigma1-one"

    @property
    def parametrization(self) -> Parametrization:
        return _PARAMS[self]

    @property
    def df(self) -> int:
        return 1


_PARAMS = {
    # u = (mu, log s0, alpha, beta, log s1)
    SubModel.EQUAL_SCALES: Parametrization(
        ("mu", "sigma", "alpha", "beta"),
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1], [0, 1, 0, 0]],
    ),
    SubModel.UNIT_MARGINAL_SCALE: Parametrization(
        ("mu", "alpha", "beta", "sigma1"),
        [[1, 0, 0, 0], [0, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]],
    ),
    SubModel.UNIT_CONDITIONAL_SCALE: Parametrization(
        ("mu", "sigma0", "alpha", "beta"),
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1], [0, 0, 0, 0]],
    ),
}


def fit_restricted(s: PairedSample, sub: SubModel, opts: Optional[SolverOptions] = None,
                   init: Optional[ModelParams] = None, compute_se: bool = True) -> FitResult:
    """Maximum likelihood under ``sub``.

    ``estimates`` is always a full :class:`ModelParams` with the constraint
    applied; ``free_estimates``/``std_errors`` follow ``parameter_names``.
    A start point outside the sub-model is projected onto it.
    """
    sub = SubModel(sub)
    opts = opts or SolverOptions()
    check_identifiable(s)
    param = sub.parametrization
    start = param.project(init if init is not None else default_init(s))
    fit = quasi_newton(s, param, start, opts, FitMethod.MLE_QUASI_NEWTON, submodel=sub)
    if compute_se:
        attach_standard_errors(fit, s, param)
    return fit


@dataclass
class LrtResult:
    submodel: SubModel
    restricted: FitResult
    unrestricted: FitResult
    statistic_T: float
    log_T: float
    minus2logT: float
    df: int
    p_value: float

    @property
    def converged(self) -> bool:
        return self.restricted.converged and self.unrestricted.converged


def lrt(s: PairedSample, sub: SubModel, opts: Optional[SolverOptions] = None,
        compute_se: bool = True) -> LrtResult:
    """Generalized likelihood-ratio test of ``sub`` against the full model.

    ``T`` is formed in log space, ``log T = l_restricted - l_full``; the
    explicit ratio of likelihood products overflows for moderate ``n``.
    If the restricted optimum beats the full one the full fit is restarted
    from it; a remaining gap beyond :data:`NESTING_SLACK` raises
    :class:`OptimizerInconsistencyError`.
    """
    sub = SubModel(sub)
    opts = opts or SolverOptions()
    full = fit_mle(s, opts=opts, compute_se=compute_se)
    restricted = fit_restricted(s, sub, opts, init=full.estimates, compute_se=compute_se)
    if restricted.loglik_at_estimate > full.loglik_at_estimate + NESTING_SLACK:
        refit = fit_mle(s, init=restricted.estimates, opts=opts, compute_se=compute_se)
        if refit.loglik_at_estimate > full.loglik_at_estimate:
            full = refit
    log_t = restricted.loglik_at_estimate - full.loglik_at_estimate
    if log_t > NESTING_SLACK:
        raise OptimizerInconsistencyError(
            f"restricted log-likelihood exceeds the full one by {log_t:.3g}")
    stat = max(0.0, -2.0 * log_t)
    return LrtResult(
        submodel=sub, restricted=restricted, unrestricted=full,
        statistic_T=math.exp(log_t), log_T=log_t, minus2logT=stat,
        df=sub.df, p_value=chi2_survival(stat, sub.df),
    )


@dataclass(frozen=True)
class ConfidenceInterval:
    lower: float
    upper: float
    level: float
    method: str

    def __post_init__(self):
        if not self.lower <= self.upper:
            raise DomainError(f"interval bounds out of order: ({self.lower}, {self.upper})")

    def contains(self, value: float) -> bool:
        return self.lower <= value <= self.upper

    @property
    def width(self) -> float:
        return self.upper - self.lower


def _check_level(level: float):
    if not (0.0 < level < 1.0):
        raise DomainError(f"confidence level must lie in (0, 1), got {level!r}")


def wald_ci(estimate: float, se: float, level: float = 0.95) -> ConfidenceInterval:
    """``estimate -/+ z * se`` with ``z`` the upper ``(1 - level)/2`` normal quantile."""
    _check_level(level)
    if not (se >= 0.0 and math.isfinite(se)):
        raise DomainError(f"standard error must be finite and non-negative, got {se!r}")
    z = norm_ppf(0.5 + 0.5 * level)
    return ConfidenceInterval(estimate - z * se, estimate + z * se, level, "wald")


def wald_intervals(fit: FitResult, level: float = 0.95) -> dict[str, ConfidenceInterval]:
    if fit.std_errors is None:
        return {}
    values = fit.free_values()
    return {name: wald_ci(float(v), float(se), level)
            for name, v, se in zip(fit.parameter_names, values, fit.std_errors)}


@dataclass
class BootstrapResult:
    parameter_names: tuple
    se: np.ndarray
    intervals: dict
    replicates: np.ndarray
    n_failed: int
    B: int


def _as_vector(out):
    """Return ``(vector, names)``; ``vector`` is None for a non-converged fit."""
    if isinstance(out, FitResult):
        if not out.converged:
            return None, out.parameter_names
        return np.asarray(out.free_values(), dtype=float), out.parameter_names
    if isinstance(out, ModelParams):
        return out.to_array(), FULL_MODEL.names
    return np.atleast_1d(np.asarray(out, dtype=float)), None


def bootstrap(s: PairedSample, estimator: Callable[[PairedSample], object], B: int = 200,
              seed: Union[int, RandomStream] = 0, level: float = 0.95, parameter_names=None,
              workers: Optional[int] = None, max_failure_rate: float = 0.10) -> BootstrapResult:
    """Nonparametric pairs bootstrap.

    Resample ``i`` draws its row indices from ``RandomStream(seed).split(i)``
    (or ``seed.split(i)`` when ``seed`` is already a stream).
    ``estimator`` may return a :class:`FitResult` (non-converged counts as a
    failure), a :class:`ModelParams` or a plain vector.  Replicates raising
    a library error are dropped and counted; more than
    ``max_failure_rate * B`` failures is an error.
    """
    if B < 2:
        raise DomainError(f"bootstrap needs B >= 2, got {B}")
    _check_level(level)
    root = seed if isinstance(seed, RandomStream) else RandomStream(seed)

    def one(i):
        idx = root.split(i).integers(s.n, s.n)
        try:
            return _as_vector(estimator(s.resample(idx)))
        except PseudoLogitError:
            return None, None

    results = ordered_map(one, range(B), workers)
    kept = [v for v, _ in results if v is not None and np.all(np.isfinite(v))]
    n_failed = B - len(kept)
    if n_failed > max_failure_rate * B or len(kept) < 2:
        raise BootstrapFailureError(f"{n_failed} of {B} bootstrap replicates failed")
    reps = np.vstack(kept)
    if parameter_names is None:
        parameter_names = next((names for _, names in results if names is not None),
                               tuple(f"theta{j}" for j in range(reps.shape[1])))
    se = reps.std(axis=0, ddof=1)
    lo, hi = 0.5 * (1.0 - level), 0.5 * (1.0 + level)
    q = np.quantile(reps, [lo, hi], axis=0)
    intervals = {name: ConfidenceInterval(float(q[0, j]), float(q[1, j]), level, "bootstrap-percentile")
                 for j, name in enumerate(parameter_names)}
    return BootstrapResult(tuple(parameter_names), se, intervals, reps, n_failed, B)
