import os
from concurrent.futures import ProcessPoolExecutor


def worker_count() -> int:
    """Worker cap from FREE_DYN_THREADS; defaults to serial execution."""
    try:
        return max(1, int(os.environ.get("FREE_DYN_THREADS", "1")))
    except ValueError:
        return 1


def pmap(fn, items, min_items: int = 64):
    """Order-preserving map; fans out to processes only for large batches."""
    items = list(items)
    workers = worker_count()
    if workers == 1 or len(items) < min_items:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))
