"""Order-preserving map honouring the CWDLAB_THREADS cap."""
import os
from concurrent.futures import ThreadPoolExecutor


def max_threads():
    raw = os.environ.get("CWDLAB_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def ordered_map(fn, items):
    """Apply fn to items; results come back in input order regardless of thread count."""
    items = list(items)
    workers = min(max_threads(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
