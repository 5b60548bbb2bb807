import asyncio
from typing import Callable, List, Optional, Sequence, TypeVar

from climtrend.config import settings
from climtrend.logger import logger

T = TypeVar("T")
R = TypeVar("R")


async def _run_all(func: Callable[[T], R], items: Sequence[T], concurrency: int) -> List[R]:
    semaphore = asyncio.Semaphore(concurrency)

    async def run_one(index: int, item: T) -> R:
        async with semaphore:
            logger.debug("Worker task started", index=index)
            try:
                return await asyncio.to_thread(func, item)
            except Exception as e:
                logger.error(f"Worker task {index} failed: {str(e)}")
                raise

    # gather preserves input order
    return await asyncio.gather(*(run_one(i, item) for i, item in enumerate(items)))


def map_concurrently(
    func: Callable[[T], R],
    items: Sequence[T],
    concurrency: Optional[int] = None,
) -> List[R]:
    """
    Apply func to every item on a bounded pool of worker threads.

    Results come back in input order. The first failure propagates.
    """
    concurrency = concurrency or settings.WORKER_CONCURRENCY
    if concurrency < 1:
        raise ValueError(f"concurrency must be positive, got {concurrency}")
    if not items:
        return []
    logger.info(f"Processing {len(items)} items", concurrency=concurrency)
    return asyncio.run(_run_all(func, list(items), concurrency))
