"""Thread fan-out helper shared by the Monte Carlo and pool evaluation loops."""
from __future__ import annotations

from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from typing import TypeVar

T = TypeVar("T")
R = TypeVar("R")


def parallel_map(fn: Callable[[T], R], items: Sequence[T], threads: int = 1) -> list[R]:
    """Apply ``fn`` to every item, preserving input order.

    Args:
        fn: Pure function of one item.
        items: Inputs.
        threads: Worker count; ``1`` (or a single item) runs inline.

    Returns:
        Results in the order of ``items``.
    """
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(threads, len(items))) as pool:
        return list(pool.map(fn, items))
