"""Order-preserving parallel map for independent work items.

numpy's eigensolvers and matmuls release the GIL, so a thread pool gives
real speedup; results always come back in input order, so output is
independent of the worker count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def resolve_threads(threads=None) -> int:
    if threads is None:
        env = os.environ.get("SPLITBELL_THREADS")
        threads = int(env) if env else (os.cpu_count() or 1)
    return max(1, int(threads))


def parallel_map(fn, items, threads=None):
    items = list(items)
    k = min(resolve_threads(threads), len(items)) if items else 1
    if k <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=k) as pool:
        return list(pool.map(fn, items))
