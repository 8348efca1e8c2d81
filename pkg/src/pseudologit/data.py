"""Paired observations with cached plug-in moments."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateSampleError, DomainError

__all__ = ["PairedSample", "summarize"]


@dataclass(frozen=True)
class PairedSample:
    """``n`` observed ``(x, y)`` pairs plus divide-by-n summary moments.

    ``r_xy`` is NaN when either variance is zero; ``degenerate`` flags that
    case.  Arrays are stored read-only.
    """

    xs: np.ndarray = field(repr=False)
    ys: np.ndarray = field(repr=False)
    n: int
    m1: float
    m2: float
    s1_sq: float
    s2_sq: float
    s12: float
    r_xy: float

    @property
    def degenerate(self) -> bool:
        return not (self.s1_sq > 0.0 and self.s2_sq > 0.0)

    def pearson(self) -> float:
        if self.degenerate:
            raise DegenerateSampleError("Pearson correlation needs both variances > 0")
        return self.r_xy

    def resample(self, idx: np.ndarray) -> "PairedSample":
        return summarize(self.xs[idx], self.ys[idx])


def summarize(xs, ys) -> PairedSample:
    x = np.array(xs, dtype=np.float64).ravel()
    y = np.array(ys, dtype=np.float64).ravel()
    if x.shape != y.shape:
        raise DomainError(f"length mismatch: {x.size} xs vs {y.size} ys")
    if x.size == 0:
        raise DomainError("sample is empty")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise DomainError("sample contains non-finite values")
    x.setflags(write=False)
    y.setflags(write=False)
    m1 = float(x.mean())
    m2 = float(y.mean())
    dx = x - m1
    dy = y - m2
    s1_sq = float(np.mean(dx * dx))
    s2_sq = float(np.mean(dy * dy))
    s12 = float(np.mean(dx * dy))
    if s1_sq > 0.0 and s2_sq > 0.0:
        r = s12 / math.sqrt(s1_sq * s2_sq)
        r = min(1.0, max(-1.0, r))
    else:
        r = math.nan
    return PairedSample(x, y, int(x.size), m1, m2, s1_sq, s2_sq, s12, r)
