"""Deterministic chunked map with an optional thread pool.

Results are always concatenated in submission order, so output does not
depend on the worker count.  ``APOINT_LAB_THREADS`` caps the pool size.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

import numpy as np

T = TypeVar("T")
R = TypeVar("R")


def worker_count() -> int:
    raw = os.environ.get("APOINT_LAB_THREADS", "")
    try:
        cap = int(raw)
    except ValueError:
        cap = 0
    ncpu = os.cpu_count() or 1
    return max(1, min(cap, ncpu) if cap > 0 else ncpu)


def ordered_map(fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
    items = list(items)
    workers = min(worker_count(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def chunked_eval(fn: Callable[[np.ndarray], np.ndarray], x, chunk: int = 20_000) -> np.ndarray:
    """Apply a vectorised ``fn`` to ``x`` in fixed-size chunks, in order."""
    x = np.asarray(x)
    if x.size <= chunk:
        return np.asarray(fn(x))
    parts = [x[i:i + chunk] for i in range(0, x.size, chunk)]
    return np.concatenate([np.atleast_1d(r) for r in ordered_map(fn, parts)])
