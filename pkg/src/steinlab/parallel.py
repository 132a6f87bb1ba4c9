"""Deterministic block-parallel Monte Carlo.

Work is split into fixed-size blocks; block ``b`` always draws from
``Rng(seed, stream=b)``.  Results come back in block order regardless of the
worker count, so any associative merge over them is reproducible.
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, List

BLOCK_SIZE = 8192


def default_workers() -> int:
    value = os.environ.get("STEINLAB_THREADS")
    if value:
        workers = int(value)
        if workers < 1:
            raise ValueError("STEINLAB_THREADS must be a positive integer")
        return workers
    return 1


def block_sizes(total: int, block_size: int = BLOCK_SIZE) -> List[int]:
    full, rest = divmod(total, block_size)
    return [block_size] * full + ([rest] if rest else [])


def map_blocks(fn: Callable, args: list, workers: int = 1) -> list:
    """``[fn(*a) for a in args]``, optionally across processes; order preserved."""
    if workers <= 1 or len(args) <= 1:
        return [fn(*a) for a in args]
    with ProcessPoolExecutor(max_workers=min(workers, len(args))) as pool:
        return list(pool.map(fn, *zip(*args)))
