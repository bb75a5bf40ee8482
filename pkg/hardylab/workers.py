import logging
from concurrent.futures import ThreadPoolExecutor

from hardylab import config

log = logging.getLogger("hardylab.workers")


def parallel_map(function, items, workers=None):
    """
    ``[function(x) for x in items]`` on a thread pool capped by
    ``HARDY_LAB_THREADS``. Order is preserved; one worker runs inline.
    """
    items = list(items)
    workers = min(workers or config.THREADS, len(items))
    if workers <= 1:
        return [function(x) for x in items]
    name = getattr(function, "__name__", type(function).__name__)
    log.debug("mapping %s over %d items on %d threads", name,
              len(items), workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(function, items))
