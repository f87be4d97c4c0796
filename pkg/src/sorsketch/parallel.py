"""Order-preserving map over a thread pool.

Work items must be independent and draw their randomness from per-item
streams; the output list order matches the input order, so results are
identical for any worker count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")

__all__ = ["pmap"]


def pmap(fn: Callable[[T], R], items: Iterable[T], workers: int = 1) -> list[R]:
    seq: Sequence[T] = list(items)
    if workers <= 1 or len(seq) <= 1:
        return [fn(item) for item in seq]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, seq))
