"""Deterministic parallel map.

Work is always split into the same fixed-size chunks whatever the worker
count, and partial results are combined in chunk order, so a run with one
thread and a run with eight produce bit-identical sums.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor

DEFAULT_CHUNK = 4096


def resolve_threads(threads: int | None = None) -> int:
    if threads is None:
        threads = int(os.environ.get("HOROLAB_THREADS", "1") or 1)
    if threads < 1:
        raise ValueError("thread count must be positive")
    return threads


def chunk_ranges(lo: int, hi: int, chunk: int = DEFAULT_CHUNK):
    return [(a, min(a + chunk, hi)) for a in range(lo, hi, chunk)]


class ParallelMap:
    """Ordered map over chunks, backed by a thread pool.

    The compiled kernels release the GIL, so threads give real speedup
    there; the numpy fallback still runs correctly, just mostly serially.
    """

    def __init__(self, threads: int | None = None):
        self.threads = resolve_threads(threads)
        self._pool = ThreadPoolExecutor(self.threads) if self.threads > 1 else None

    def map(self, fn, items):
        items = list(items)
        if self._pool is None or len(items) < 2:
            return [fn(it) for it in items]
        return list(self._pool.map(fn, items))

    def close(self):
        if self._pool is not None:
            self._pool.shutdown()
            self._pool = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


SERIAL = ParallelMap(1)


def ordered_sum(parts) -> complex:
    """Exactly rounded sum of partial results, independent of grouping."""
    parts = list(parts)
    return complex(math.fsum(p.real for p in parts), math.fsum(p.imag for p in parts))
