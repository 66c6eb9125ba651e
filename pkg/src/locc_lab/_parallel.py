"""Thread-pool helper honouring the LOCC_LAB_THREADS cap."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def max_workers(default: int = 1) -> int:
    raw = os.environ.get("LOCC_LAB_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        return default
    return max(1, n)


def ordered_map(fn, items, workers: int | None = None) -> list:
    """map() that keeps input order; runs in a pool when workers > 1."""
    items = list(items)
    n = max_workers() if workers is None else max(1, int(workers))
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
