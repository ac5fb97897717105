"""
Thread-pool helpers for embarrassingly parallel bias-point work.

numpy/scipy release the GIL inside the heavy kernels (sparse matvecs, FFTs,
LAPACK), so threads are enough.
"""

import logging
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Callable, List, Sequence, Tuple, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

MAX_WORKERS = 8


def parallel_map(fn: Callable[[T], R], items: Sequence[T], max_workers: int = 1) -> List[R]:
    """
    Apply fn to every item, preserving input order.

    Runs serially when max_workers <= 1. The first exception raised by any
    item is re-raised after the pool drains.
    """
    items = list(items)
    if max_workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]

    results: List = [None] * len(items)
    with ThreadPoolExecutor(max_workers=min(max_workers, MAX_WORKERS, len(items))) as executor:
        futures = {executor.submit(fn, item): idx for idx, item in enumerate(items)}
        for future in as_completed(futures):
            results[futures[future]] = future.result()
    return results


def parallel_map_collect(
    fn: Callable[[T], R],
    items: Sequence[T],
    max_workers: int = 1,
    catch: Tuple[type, ...] = (Exception,),
) -> List[Tuple[T, R, Exception]]:
    """
    Like parallel_map but records per-item failures instead of raising.

    Returns (item, result, error) triples in input order; exactly one of
    result and error is None.
    """
    items = list(items)

    def _safe(item):
        try:
            return item, fn(item), None
        except catch as e:
            logger.warning(f"Item {item!r} failed: {e}")
            return item, None, e

    return parallel_map(_safe, items, max_workers)
