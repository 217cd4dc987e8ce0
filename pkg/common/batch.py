"""
Ordered worker pool for embarrassingly parallel jobs.
- Thread-based: numpy's random generators and reductions release the GIL
- Results come back in submission order regardless of scheduling
- Optional tqdm progress bar
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, TypeVar

from loguru import logger
from tqdm import tqdm

T = TypeVar("T")
R = TypeVar("R")


def run_ordered(
    fn: Callable[[T], R],
    items: Sequence[T],
    workers: int = 1,
    desc: Optional[str] = None,
    progress: bool = False,
) -> List[R]:
    """
    Apply fn to every item, in parallel when workers > 1.
    Args:
        fn: Job function; must only depend on its item for reproducible output.
        items: Job descriptions.
        workers: Max concurrent jobs.
        desc: Progress bar label.
        progress: Show a tqdm progress bar.
    Returns:
        Results in the order of `items`.
    """
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    total = len(items)
    bar = tqdm(total=total, desc=desc, disable=not progress)
    try:
        if workers == 1 or total <= 1:
            results = []
            for item in items:
                results.append(fn(item))
                bar.update(1)
            return results

        results: List[Optional[R]] = [None] * total
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {pool.submit(fn, item): idx for idx, item in enumerate(items)}
            for future in futures:
                idx = futures[future]
                try:
                    results[idx] = future.result()
                except Exception as e:
                    logger.error(f"Job {idx + 1}/{total} failed: {e}")
                    raise
                bar.update(1)
        return results  # type: ignore[return-value]
    finally:
        bar.close()
