"""
Batch Runner - bounded parallel evaluation of independent cases
Obrauer - Cyclotomic Oriented Brauer Engine
"""

import asyncio
import time
from typing import Any, Callable, List, Sequence, TypeVar

import structlog

from app.core.metrics import BATCH_CASES_IN_PROGRESS

logger = structlog.get_logger()

Case = TypeVar("Case")


async def run_cases(
    cases: Sequence[Case],
    worker: Callable[[Case], Any],
    max_workers: int = 4,
) -> List[Any]:
    """Run ``worker`` over ``cases`` in threads; results keep the case order."""
    if max_workers < 1:
        max_workers = 1
    semaphore = asyncio.Semaphore(max_workers)
    start = time.time()

    async def run_one(case: Case) -> Any:
        async with semaphore:
            BATCH_CASES_IN_PROGRESS.inc()
            try:
                return await asyncio.to_thread(worker, case)
            finally:
                BATCH_CASES_IN_PROGRESS.dec()

    results = await asyncio.gather(*(run_one(case) for case in cases))
    logger.debug(
        "batch_completed",
        cases=len(cases),
        max_workers=max_workers,
        duration_ms=int((time.time() - start) * 1000),
    )
    return list(results)


def run_cases_sync(
    cases: Sequence[Case],
    worker: Callable[[Case], Any],
    max_workers: int = 4,
) -> List[Any]:
    if max_workers <= 1 or len(cases) <= 1:
        return [worker(case) for case in cases]
    return asyncio.run(run_cases(cases, worker, max_workers))
