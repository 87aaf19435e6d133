"""Row-parallel evaluation with order-independent results."""
from __future__ import annotations

import multiprocessing as mp
from concurrent.futures import ProcessPoolExecutor


def map_rows(func, tasks, workers=1):
    """Apply ``func`` to every task and return results in task order.

    Each task is evaluated by exactly the same call whatever the worker
    count, so results are bit-identical between serial and parallel runs.
    """
    tasks = list(tasks)
    if workers is None or workers <= 1 or len(tasks) <= 1:
        return [func(t) for t in tasks]
    ctx = mp.get_context("fork")
    with ProcessPoolExecutor(max_workers=workers, mp_context=ctx) as pool:
        return list(pool.map(func, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
