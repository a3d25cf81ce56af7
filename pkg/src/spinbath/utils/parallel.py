"""
Order-preserving parallel map.

Work items are independent and results come back in input order, so any
reduction over them is a fixed-order sum regardless of worker count.
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

from spinbath.core.config import settings
from spinbath.core.logging import get_logger

logger = get_logger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def resolve_workers(workers: Optional[int] = None) -> int:
    """Explicit value, else SPINBATH_WORKERS, else available parallelism."""
    if workers is None:
        workers = settings.WORKERS
    return max(1, int(workers))


def parallel_map(
    func: Callable[[T], R],
    items: Iterable[T],
    workers: Optional[int] = None,
) -> List[R]:
    """
    Apply ``func`` to every item, optionally on a thread pool.

    numpy releases the GIL inside its dense kernels, which is where sampled
    circuits spend their time.
    """
    items = list(items)
    n_workers = min(resolve_workers(workers), max(len(items), 1))
    if n_workers == 1:
        return [func(item) for item in items]
    logger.debug(f"Mapping {len(items)} items over {n_workers} threads")
    with ThreadPoolExecutor(max_workers=n_workers) as pool:
        return list(pool.map(func, items))
