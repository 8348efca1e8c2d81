"""Order-preserving fan-out for replicate loops."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

ENV_THREADS = "PSEUDOLOGIT_THREADS"


def worker_count(requested: int | None = None) -> int:
    if requested is not None:
        return max(1, int(requested))
    raw = os.environ.get(ENV_THREADS, "").strip()
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def ordered_map(fn, items, workers: int | None = None) -> list:
    """``list(map(fn, items))``, optionally on a thread pool.

    Results come back in input order whatever the scheduling, so callers
    that seed each item independently get schedule-independent output.
    """
    n = worker_count(workers)
    items = list(items)
    if n == 1 or len(items) < 2:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
