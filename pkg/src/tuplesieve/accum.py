"""Deterministic summation helpers.

Long reductions are split into fixed-size blocks; each block is summed with
numpy's pairwise algorithm and the block results are merged with math.fsum,
which is exactly rounded.  Block boundaries never depend on the worker
count, so a sum computed with 1, 2, or 8 threads is bit-identical.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence

import numpy as np

BLOCK = 1 << 16


def block_sum(values: np.ndarray) -> float:
    """Sum a 1-d float array blockwise with an exact final merge."""
    n = values.size
    if n == 0:
        return 0.0
    parts = [float(np.sum(values[i:i + BLOCK])) for i in range(0, n, BLOCK)]
    return math.fsum(parts)


def map_blocks(fn: Callable[[int], float], nblocks: int, threads: int = 1) -> float:
    """Evaluate fn(block_index) for every block and merge with fsum.

    fn must be a pure function of the block index.  Results are merged in
    index order, so the value is independent of the thread count.
    """
    if nblocks <= 0:
        return 0.0
    if threads <= 1:
        parts = [fn(i) for i in range(nblocks)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(fn, range(nblocks)))
    return math.fsum(parts)


def block_dot(arrays: Sequence[np.ndarray], threads: int = 1) -> float:
    """Deterministic sum of the elementwise product of equal-length arrays."""
    n = arrays[0].size
    for a in arrays[1:]:
        if a.size != n:
            raise ValueError("block_dot needs equal-length arrays")
    if n == 0:
        return 0.0
    nblocks = (n + BLOCK - 1) // BLOCK

    def one(i: int) -> float:
        sl = slice(i * BLOCK, min((i + 1) * BLOCK, n))
        prod = arrays[0][sl].copy()
        for a in arrays[1:]:
            prod *= a[sl]
        return float(np.sum(prod))

    return map_blocks(one, nblocks, threads)


def block_ranges(start: int, end: int, size: int = BLOCK) -> list[tuple[int, int]]:
    """Half-open (lo, hi] subranges of (start, end] with fixed boundaries."""
    out = []
    lo = start
    while lo < end:
        hi = min(lo + size, end)
        out.append((lo, hi))
        lo = hi
    return out


def run_chunks(work: Callable[[int, int], None], ranges: Sequence[tuple[int, int]], threads: int = 1) -> None:
    """Run work(lo, hi) over disjoint chunks, optionally on a thread pool."""
    if threads <= 1:
        for lo, hi in ranges:
            work(lo, hi)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(lambda r: work(r[0], r[1]), ranges))
