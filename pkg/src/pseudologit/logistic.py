"""Univariate logistic distribution.

All functions accept a scalar or an array for ``x``/``u`` and return the
same shape (a Python float for scalar input).  Evaluation branches on the
sign of the standardized argument so ``exp`` only ever sees non-positive
values; nothing overflows however far into the tails ``x`` sits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .kernels import logistic_logpdf_std
from .rng import as_stream

__all__ = ["LogisticParams", "pdf", "log_pdf", "cdf", "quantile", "sample",
           "VARIANCE_FACTOR"]

#: Var(X) = scale**2 * VARIANCE_FACTOR
VARIANCE_FACTOR = math.pi ** 2 / 3.0


@dataclass(frozen=True)
class LogisticParams:
    location: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        loc = float(self.location)
        scale = float(self.scale)
        if not math.isfinite(loc):
            raise DomainError(f"location must be finite, got {self.location!r}")
        if not (math.isfinite(scale) and scale > 0.0):
            raise DomainError(f"scale must be finite and > 0, got {self.scale!r}")
        object.__setattr__(self, "location", loc)
        object.__setattr__(self, "scale", scale)

    @property
    def variance(self) -> float:
        return self.scale ** 2 * VARIANCE_FACTOR


def _std(x, p: LogisticParams, allow_inf: bool = False):
    arr = np.asarray(x, dtype=np.float64)
    bad = np.isnan(arr) if allow_inf else ~np.isfinite(arr)
    if np.any(bad):
        raise DomainError("x must be finite" if not allow_inf else "x must not be NaN")
    return arr, (arr - p.location) / p.scale


def _out(arr, template):
    return float(arr) if np.ndim(template) == 0 else arr


def log_pdf(x, p: LogisticParams = LogisticParams()):
    """Log-density ``-|z| - log(scale) - 2 log1p(exp(-|z|))``."""
    arr, z = _std(x, p)
    z1 = np.atleast_1d(z).astype(np.float64).ravel()
    out = logistic_logpdf_std(z1).reshape(np.shape(z)) - math.log(p.scale)
    return _out(out, arr)


def pdf(x, p: LogisticParams = LogisticParams()):
    arr, z = _std(x, p)
    e = np.exp(-np.abs(z))
    out = e / (p.scale * (1.0 + e) ** 2)
    return _out(out, arr)


def cdf(x, p: LogisticParams = LogisticParams()):
    """Distribution function; ``-inf`` maps to 0 and ``+inf`` to 1 exactly."""
    arr, z = _std(x, p, allow_inf=True)
    e = np.exp(-np.abs(z))
    with np.errstate(invalid="ignore"):
        out = np.where(z >= 0, 1.0 / (1.0 + e), e / (1.0 + e))
    return _out(out, arr)


def quantile(u, p: LogisticParams = LogisticParams()):
    arr = np.asarray(u, dtype=np.float64)
    if np.any(~((arr > 0.0) & (arr < 1.0))):
        raise DomainError("quantile needs 0 < u < 1")
    out = p.location + p.scale * (np.log(arr) - np.log1p(-arr))
    return _out(out, arr)


def sample(p: LogisticParams, rng=None, size: int | None = None):
    """Inverse-transform draw(s) from ``rng``'s open-interval uniforms."""
    stream = as_stream(rng)
    if size is None:
        return quantile(stream.uniform(), p)
    return quantile(stream.uniforms(size), p)
