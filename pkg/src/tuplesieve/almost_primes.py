"""Products of two distinct primes and their gap statistics.

A value qualifies only when it is squarefree with exactly two prime
factors: p^2 is excluded, and so is anything like 12 = 2^2 * 3.  The table
is built by direct pair enumeration p < q, p*q <= limit over the prime
list, which is one vectorized pass per small prime.
"""

from dataclasses import dataclass

import numpy as np

from .arith import get_prime_table
from .budget import check_memory


@dataclass(frozen=True)
class E2Table:
    limit: int
    values: np.ndarray  # sorted int64, each a product of two distinct primes


@dataclass(frozen=True)
class E2GapReport:
    limit: int
    r: int
    count: int                  # number of gap rows q_{n+r} - q_n
    histogram: dict[int, int]
    min_gap: int
    consecutive_leq6: int       # count of consecutive gaps (r=1) at most 6


def e2_sieve(limit: int) -> E2Table:
    """All products of two distinct primes up to the limit, sorted."""
    if limit < 6:
        raise ValueError("limit must be at least 6")
    check_memory(3 * 8 * (limit // 4), "two-prime-product table")
    primes = get_prime_table(limit // 2).primes
    chunks = []
    for p in primes:
        p = int(p)
        if p * p > limit:
            break
        qs = primes[(primes > p) & (primes <= limit // p)]
        if qs.size:
            chunks.append(p * qs.astype(np.int64))
    values = np.sort(np.concatenate(chunks)) if chunks else np.empty(0, dtype=np.int64)
    return E2Table(limit=limit, values=values)


def e2_gap_stats(limit: int, r: int = 1, table: E2Table | None = None) -> E2GapReport:
    """Histogram and minimum of the r-step gaps between two-prime products."""
    if limit < 100:
        raise ValueError("limit must be at least 100")
    if r < 1:
        raise ValueError("r must be >= 1")
    t = table if table is not None and table.limit == limit else e2_sieve(limit)
    v = t.values
    if v.size <= r:
        raise ValueError("not enough values below the limit")
    gaps = v[r:] - v[:-r]
    uniq, counts = np.unique(gaps, return_counts=True)
    consecutive = v[1:] - v[:-1]
    return E2GapReport(
        limit=limit, r=r, count=int(gaps.size),
        histogram={int(g): int(c) for g, c in zip(uniq, counts)},
        min_gap=int(gaps.min()),
        consecutive_leq6=int(np.count_nonzero(consecutive <= 6)),
    )
