# workers.py
import logging
from typing import Callable, Dict, List, Sequence, TypeVar

import anyio

ItemT = TypeVar("ItemT")
ResultT = TypeVar("ResultT")


async def run_in_workers(
    items: Sequence[ItemT],
    fn: Callable[[ItemT], ResultT],
    workers: int,
) -> List[ResultT]:
    """
    Run `fn` over `items` in worker threads, at most `workers` at a time.
    Results come back in input order whatever order the workers finish in.
    """
    limiter = anyio.CapacityLimiter(max(1, workers))
    results: Dict[int, ResultT] = {}

    async def run_one(index: int, item: ItemT) -> None:
        results[index] = await anyio.to_thread.run_sync(fn, item, limiter=limiter)

    # debug
    logging.debug(f"Dispatching {len(items)} job(s) to {workers} worker(s)")

    async with anyio.create_task_group() as tg:
        for index, item in enumerate(items):
            tg.start_soon(run_one, index, item)

    return [results[i] for i in range(len(items))]
