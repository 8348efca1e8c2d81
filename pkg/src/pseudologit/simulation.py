"""Sampling from the model and the Monte Carlo study harness.

Pairs are drawn by sequential inverse transform: one uniform for ``x``
from the logistic marginal, the next for ``y`` given ``x``.  The study
derives every random number from ``RandomStream(seed).split(size_index,
replicate, purpose)`` so its output does not depend on how replicates are
scheduled across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

import numpy as np

from . import kernels
from ._parallel import ordered_map
from .data import PairedSample, summarize
from .errors import ConvergenceError, DomainError, PseudoLogitError
from .estimation import FULL_MODEL, fit_mle, method_of_moments
from .inference import SubModel, bootstrap, fit_restricted
from .model import PAPER_PARAMS, ModelParams, joint_log_pdf
from .rng import RandomStream, as_stream

__all__ = [
    "sample_pair", "sample_arrays", "sample_dataset", "pearson_correlation",
    "StudyConfig", "StudyReport", "EstimatorSummary", "ParameterRow", "SampleSizeBlock",
    "run_study", "DensityGrid", "density_grid", "MAX_FAILURE_RATE",
]

MAX_FAILURE_RATE = 0.10
DATA, BOOT = 0, 1


def _pairs(p: ModelParams, u: np.ndarray):
    return kernels.pairs_from_uniforms(np.ascontiguousarray(u, dtype=np.float64),
                                       p.mu, p.sigma0, p.alpha, p.beta, p.sigma1)


def sample_pair(p: ModelParams, rng=None) -> tuple[float, float]:
    xs, ys = _pairs(p, as_stream(rng).uniforms(2))
    return float(xs[0]), float(ys[0])


def sample_arrays(p: ModelParams, n: int, rng=None) -> tuple[np.ndarray, np.ndarray]:
    """``n`` pairs as two arrays; ``n = 0`` gives empty arrays."""
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    return _pairs(p, as_stream(rng).uniforms(2 * n))


def sample_dataset(p: ModelParams, n: int, rng=None) -> PairedSample:
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    return summarize(*sample_arrays(p, n, rng))


def pearson_correlation(s: PairedSample) -> float:
    return s.pearson()


# --------------------------------------------------------------------------
# study harness


@dataclass
class StudyConfig:
    true_params: ModelParams = PAPER_PARAMS
    sample_sizes: Sequence[int] = (30, 50, 100, 200, 500)
    replicates: int = 500
    submodel: Optional[SubModel] = None
    bootstrap_B: int = 0
    ci_level: float = 0.95
    seed: int = 0
    mom_variant: str = "corrected"

    def __post_init__(self):
        self.sample_sizes = tuple(int(n) for n in self.sample_sizes)
        if not self.sample_sizes:
            raise DomainError("at least one sample size is required")
        if min(self.sample_sizes) < 6:
            raise DomainError("sample sizes must be >= 6")
        if self.replicates < 1:
            raise DomainError("replicates must be >= 1")
        if self.bootstrap_B < 0 or self.bootstrap_B == 1:
            raise DomainError("bootstrap_B must be 0 (off) or >= 2")
        if not (0.0 < self.ci_level < 1.0):
            raise DomainError("ci_level must lie in (0, 1)")
        if self.mom_variant not in ("paper", "corrected"):
            raise DomainError(f"unknown method-of-moments variant {self.mom_variant!r}")
        if self.submodel is not None:
            self.submodel = SubModel(self.submodel)
        if not (0 <= int(self.seed) < 2 ** 64):
            raise DomainError("seed must be a 64-bit unsigned integer")


@dataclass
class EstimatorSummary:
    mean: float
    se: float
    bias: float
    ci_lower: float
    ci_upper: float
    n_used: int


def _summarize_estimates(values: np.ndarray, truth: float, level: float) -> Optional[EstimatorSummary]:
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return None
    mean = float(np.mean(values))
    se = float(np.std(values, ddof=1)) if values.size > 1 else 0.0
    lo, hi = np.quantile(values, [0.5 * (1.0 - level), 0.5 * (1.0 + level)])
    return EstimatorSummary(mean, se, mean - truth, float(lo), float(hi), int(values.size))


@dataclass
class ParameterRow:
    model: str
    n: int
    parameter: str
    true_value: float
    mle: EstimatorSummary
    mom_paper: Optional[EstimatorSummary] = None
    mom_corrected: Optional[EstimatorSummary] = None
    boot_se_mle: Optional[float] = None


@dataclass
class SampleSizeBlock:
    n: int
    replicates: int
    n_failed: int
    pc_mean: float
    minus2loglik_mean: float
    rows: list
    mle_estimates: np.ndarray = field(repr=False)
    restricted_minus2loglik_mean: Optional[float] = None
    restricted_estimates: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def failure_rate(self) -> float:
        return self.n_failed / self.replicates


@dataclass
class StudyReport:
    config: StudyConfig
    blocks: list

    def rows(self) -> Iterator[ParameterRow]:
        for block in self.blocks:
            yield from block.rows

    def block(self, n: int) -> SampleSizeBlock:
        for b in self.blocks:
            if b.n == n:
                return b
        raise KeyError(n)


@dataclass
class _Replicate:
    needs_restricted: bool = False
    mle: Optional[np.ndarray] = None
    mom_paper: Optional[np.ndarray] = None
    mom_corrected: Optional[np.ndarray] = None
    restricted: Optional[np.ndarray] = None
    restricted_m2ll: Optional[float] = None
    boot_se: Optional[np.ndarray] = None
    pc: float = math.nan
    m2ll: float = math.nan

    @property
    def ok(self) -> bool:
        return self.mle is not None and (self.restricted is not None or not self.needs_restricted)


def _try(fn):
    try:
        return fn()
    except PseudoLogitError:
        return None


def _one_replicate(cfg: StudyConfig, size_index: int, rep: int) -> _Replicate:
    root = RandomStream(cfg.seed)
    n = cfg.sample_sizes[size_index]
    data = sample_dataset(cfg.true_params, n, root.split(size_index, rep, DATA))
    out = _Replicate(needs_restricted=cfg.submodel is not None)
    out.pc = data.r_xy
    mp = _try(lambda: method_of_moments(data, "paper"))
    mc = _try(lambda: method_of_moments(data, "corrected"))
    out.mom_paper = None if mp is None else mp.estimates.to_array()
    out.mom_corrected = None if mc is None else mc.estimates.to_array()
    fit = _try(lambda: fit_mle(data, compute_se=False))
    if fit is None or not fit.converged:
        return out
    out.mle = fit.estimates.to_array()
    out.m2ll = fit.minus2loglik
    if cfg.submodel is not None:
        r = _try(lambda: fit_restricted(data, cfg.submodel, init=fit.estimates, compute_se=False))
        if r is not None and r.converged:
            out.restricted = r.free_values()
            out.restricted_m2ll = r.minus2loglik
    if cfg.bootstrap_B:
        est = lambda d: fit_mle(d, compute_se=False)  # noqa: E731
        boot = _try(lambda: bootstrap(data, est, cfg.bootstrap_B, root.split(size_index, rep, BOOT),
                                      cfg.ci_level, workers=1))
        out.boot_se = None if boot is None else boot.se
    return out


def run_study(cfg: StudyConfig, workers: Optional[int] = None) -> StudyReport:
    """Simulate, fit and aggregate for every sample size in ``cfg``.

    SE columns are the standard deviation of the estimates across
    replicates; CI columns are percentile intervals of those estimates at
    ``cfg.ci_level``.  When ``bootstrap_B > 0`` the mean within-replicate
    bootstrap SE of each MLE is reported as well.  A replicate whose ML fit
    fails or does not converge is excluded; more than 10% exclusions at any
    sample size raise :class:`ConvergenceError`.
    """
    truth = cfg.true_params.to_array()
    blocks = []
    for i, n in enumerate(cfg.sample_sizes):
        reps = ordered_map(lambda r: _one_replicate(cfg, i, r), range(cfg.replicates), workers)
        good = [r for r in reps if r.ok]
        n_failed = cfg.replicates - len(good)
        if n_failed > MAX_FAILURE_RATE * cfg.replicates:
            raise ConvergenceError(
                f"{n_failed} of {cfg.replicates} replicates failed at n={n}")
        mle = np.array([r.mle for r in good]).reshape(-1, 5)
        mp = np.array([r.mom_paper for r in good if r.mom_paper is not None]).reshape(-1, 5)
        mc = np.array([r.mom_corrected for r in good if r.mom_corrected is not None]).reshape(-1, 5)
        boots = [r.boot_se for r in good if r.boot_se is not None]
        rows = []
        for j, name in enumerate(FULL_MODEL.names):
            rows.append(ParameterRow(
                model="full", n=n, parameter=name, true_value=float(truth[j]),
                mle=_summarize_estimates(mle[:, j], truth[j], cfg.ci_level),
                mom_paper=_summarize_estimates(mp[:, j], truth[j], cfg.ci_level),
                mom_corrected=_summarize_estimates(mc[:, j], truth[j], cfg.ci_level),
                boot_se_mle=float(np.mean([b[j] for b in boots])) if boots else None,
            ))
        block = SampleSizeBlock(
            n=n, replicates=cfg.replicates, n_failed=n_failed,
            pc_mean=float(np.mean([r.pc for r in good])),
            minus2loglik_mean=float(np.mean([r.m2ll for r in good])),
            rows=rows, mle_estimates=mle,
        )
        if cfg.submodel is not None:
            param = cfg.submodel.parametrization
            sub_truth = param.natural(param.from_params(cfg.true_params))
            restricted = np.array([r.restricted for r in good]).reshape(-1, param.k)
            for j, name in enumerate(param.names):
                rows.append(ParameterRow(
                    model=cfg.submodel.value, n=n, parameter=name, true_value=float(sub_truth[j]),
                    mle=_summarize_estimates(restricted[:, j], sub_truth[j], cfg.ci_level),
                ))
            block.restricted_estimates = restricted
            block.restricted_minus2loglik_mean = float(np.mean([r.restricted_m2ll for r in good]))
        blocks.append(block)
    return StudyReport(cfg, blocks)


# --------------------------------------------------------------------------
# density grid


@dataclass
class DensityGrid:
    x: np.ndarray
    y: np.ndarray
    density: np.ndarray  # density[i, j] at (x[i], y[j])

    def rows(self) -> Iterator[tuple[float, float, float]]:
        """Row-major ``(x, y, density)`` triples, ``x`` varying slowest."""
        for i, xv in enumerate(self.x):
            for j, yv in enumerate(self.y):
                yield float(xv), float(yv), float(self.density[i, j])

    @property
    def cell_area(self) -> float:
        return float((self.x[1] - self.x[0]) * (self.y[1] - self.y[0]))


def density_grid(p: ModelParams, x_range: tuple[float, float], y_range: tuple[float, float],
                 resolution: int) -> DensityGrid:
    """Joint density on a ``resolution x resolution`` lattice including the endpoints."""
    for name, (lo, hi) in (("x_range", x_range), ("y_range", y_range)):
        if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
            raise DomainError(f"{name} must be finite with lower < upper, got ({lo}, {hi})")
    if int(resolution) != resolution or resolution < 2:
        raise DomainError(f"resolution must be an integer >= 2, got {resolution!r}")
    x = np.linspace(x_range[0], x_range[1], int(resolution))
    y = np.linspace(y_range[0], y_range[1], int(resolution))
    xx, yy = np.meshgrid(x, y, indexing="ij")
    return DensityGrid(x, y, np.exp(joint_log_pdf(p, xx, yy)))
