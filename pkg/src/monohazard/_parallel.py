"""Ordered map over independent work units."""

from concurrent.futures import ThreadPoolExecutor


def ordered_map(fn, items, threads=1):
    """``[fn(x) for x in items]``, optionally spread over a thread pool.

    Results always come back in input order, so reductions over them do not
    depend on scheduling.
    """
    items = list(items)
    if threads is None or threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=int(threads)) as pool:
        return list(pool.map(fn, items))
