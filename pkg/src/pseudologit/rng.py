"""Seedable, splittable random streams producing open-interval uniforms."""

from __future__ import annotations

import numpy as np

_TWO_M53 = 2.0 ** -53


class RandomStream:
    """Deterministic uniform source built on numpy's PCG64.

    A stream is identified by its root seed and a *path* of child indices.
    ``split(i, j)`` derives an independent substream whose draws depend
    only on ``(seed, path + (i, j))``, so replicate ``k`` of a study gets
    the same numbers whether it runs first, last, or on another thread.

    Uniforms lie strictly inside (0, 1): a 53-bit integer ``k`` maps to
    ``(k + 0.5) * 2**-53``.
    """

    def __init__(self, seed: int = 0, path: tuple[int, ...] = ()):
        self.seed = int(seed)
        self.path = tuple(int(i) for i in path)
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=self.path)
        self._gen = np.random.Generator(np.random.PCG64(ss))

    def split(self, *index: int) -> "RandomStream":
        if not index:
            raise ValueError("split needs at least one child index")
        if any(int(i) < 0 for i in index):
            raise ValueError("child indices must be non-negative")
        return RandomStream(self.seed, self.path + tuple(index))

    def uniforms(self, size: int) -> np.ndarray:
        bits = self._gen.integers(0, 2**53, size=int(size), dtype=np.int64)
        return (bits.astype(np.float64) + 0.5) * _TWO_M53

    def uniform(self) -> float:
        return float(self.uniforms(1)[0])

    def integers(self, high: int, size: int) -> np.ndarray:
        """Uniform integers in ``[0, high)``; used for bootstrap index draws."""
        return self._gen.integers(0, high, size=size)

    def __repr__(self) -> str:
        return f"RandomStream(seed={self.seed}, path={self.path})"


def as_stream(rng) -> RandomStream:
    """Accept a RandomStream, an int seed, or None (seed 0)."""
    if rng is None:
        return RandomStream(0)
    if isinstance(rng, (int, np.integer)):
        return RandomStream(int(rng))
    return rng
