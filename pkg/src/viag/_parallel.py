import os
from concurrent.futures import ProcessPoolExecutor


def default_jobs() -> int:
    return os.cpu_count() or 1


def parallel_map(fn, items, jobs=1):
    """``list(map(fn, items))`` spread over ``jobs`` processes, input order kept.

    ``fn`` must be picklable (module-level function or ``functools.partial``).
    """
    items = list(items)
    if jobs is None:
        jobs = default_jobs()
    if jobs <= 1 or len(items) < 2:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=min(jobs, len(items))) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * jobs))))
