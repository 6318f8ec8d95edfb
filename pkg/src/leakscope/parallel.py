"""Order-preserving map with an optional process pool.

Parallelism is capped by the ``LEAKSCOPE_THREADS`` environment variable
(default 1, i.e. serial).  Results always come back in input order.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")

# below this many items a pool costs more than it saves
_MIN_PARALLEL = 2000


def worker_count() -> int:
    raw = os.environ.get("LEAKSCOPE_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"LEAKSCOPE_THREADS must be an integer, got {raw!r}") from None
    return max(1, n)


def parallel_map(fn: Callable[[T], R], items: Sequence[T]) -> list[R]:
    n = worker_count()
    if n == 1 or len(items) < _MIN_PARALLEL:
        return [fn(x) for x in items]
    chunk = max(1, len(items) // (n * 4))
    with ProcessPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items, chunksize=chunk))
