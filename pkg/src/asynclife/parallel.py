"""Worker-pool helper for trial-level parallelism.

Results are returned in task order, and every worker derives its randomness
from the task arguments alone, so outputs are identical for any worker count.
"""

from __future__ import annotations

import multiprocessing as mp
from typing import Callable, Iterable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")

__all__ = ["parallel_map"]


def _pool_context():
    methods = mp.get_all_start_methods()
    return mp.get_context("fork" if "fork" in methods else "spawn")


def parallel_map(fn: Callable[[T], R], tasks: Iterable[T], threads: int = 1) -> list[R]:
    """Map ``fn`` over ``tasks``, optionally on a process pool.

    ``threads`` <= 1 runs serially in-process.  ``fn`` and the tasks must be
    picklable when threads > 1.
    """
    items: Sequence[T] = list(tasks)
    if threads <= 1 or len(items) <= 1:
        return [fn(t) for t in items]
    with _pool_context().Pool(processes=min(threads, len(items))) as pool:
        return pool.map(fn, items, chunksize=1)
