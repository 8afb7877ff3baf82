"""
Worker Pool
===========

Order-preserving parallel map over independent chunks, capped by the
``FIBOCHAIN_THREADS`` environment variable.
"""

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, TypeVar

import numpy as np

T = TypeVar("T")
R = TypeVar("R")

THREADS_ENV = "FIBOCHAIN_THREADS"

logger = logging.getLogger(__name__)


def thread_cap() -> int:
    """Configured worker count; falls back to the CPU count."""
    raw = os.getenv(THREADS_ENV)
    if raw:
        try:
            value = int(raw)
            if value >= 1:
                return value
        except ValueError:
            pass
        logger.warning("Ignoring invalid %s=%r", THREADS_ENV, raw)
    return os.cpu_count() or 1


def parallel_map(
    func: Callable[[T], R], items: Sequence[T], max_workers: Optional[int] = None
) -> List[R]:
    """Apply ``func`` to every item, results in input order."""
    workers = min(max_workers or thread_cap(), len(items))
    if workers <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


def split_range(lo: int, hi: int, parts: int) -> List[range]:
    """Split the integer range [lo, hi] into at most ``parts`` contiguous ranges."""
    if hi < lo:
        return []
    edges = np.linspace(lo, hi + 1, num=max(1, parts) + 1).astype(np.int64)
    ranges = [range(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:])]
    return [r for r in ranges if len(r) > 0]


def chunked(seq: Sequence[T], size: int) -> List[Sequence[T]]:
    return [seq[i : i + size] for i in range(0, len(seq), size)]
