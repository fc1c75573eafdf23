"""Sieved arithmetic tables and classical prime-counting functions.

Provides:
- PrimeTable: segmented Eratosthenes sieve with bit-packed primality and a
  sorted prime list.
- MobiusTable: mu(n), Euler phi(n), and smallest-prime-factor tables, with
  factorization helpers driven by the smallest-factor table.
- von_mangoldt(n) = log p for prime powers p^m, else 0.
- generalized_von_mangoldt(n, k) = sum over d | n of mu(d) (log(n/d))^k,
  which vanishes when n has more than k distinct prime factors.
- chebyshev_psi(x) = sum of von_mangoldt(n) for n <= x.

All logarithms are natural.  Tables are immutable after construction and
safe to share read-only across threads.  Sieving proceeds in fixed-size
segments so the working set stays O(segment) plus the packed bits.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .budget import check_memory

SEGMENT = 1 << 22


def _simple_prime_mask(limit: int) -> np.ndarray:
    """Plain boolean sieve, used for base primes up to sqrt(limit)."""
    mask = np.ones(limit + 1, dtype=bool)
    mask[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if mask[p]:
            mask[p * p:: p] = False
    return mask


@dataclass(frozen=True)
class PrimeTable:
    """Primality of every n <= limit, bit-packed, plus the sorted primes."""

    limit: int
    bits: np.ndarray    # uint8, MSB-first packing of is_prime over [0, limit]
    primes: np.ndarray  # int64, strictly increasing

    def is_prime(self, n: int) -> bool:
        if n < 0 or n > self.limit:
            raise ValueError(f"n={n} outside table range [0, {self.limit}]")
        return bool((self.bits[n >> 3] >> (7 - (n & 7))) & 1)

    def prime_mask(self, lo: int = 0, hi: int | None = None) -> np.ndarray:
        """Boolean primality array for n in [lo, hi] inclusive."""
        if hi is None:
            hi = self.limit
        if lo < 0 or hi > self.limit or lo > hi:
            raise ValueError(f"bad range [{lo}, {hi}] for limit {self.limit}")
        check_memory(hi - lo + 1, "prime mask")
        b0 = lo >> 3
        b1 = hi >> 3
        unpacked = np.unpackbits(self.bits[b0:b1 + 1]).astype(bool)
        return unpacked[lo - 8 * b0: lo - 8 * b0 + (hi - lo + 1)]

    def count(self) -> int:
        return int(self.primes.size)


def sieve_primes(limit: int) -> PrimeTable:
    """Segmented sieve of Eratosthenes up to limit inclusive."""
    if limit < 2:
        raise ValueError("limit must be at least 2")
    approx_pi = int(1.3 * limit / max(math.log(limit), 1.0)) + 16
    check_memory(limit // 8 + 8 * approx_pi + SEGMENT, "prime table")

    base = np.flatnonzero(_simple_prime_mask(math.isqrt(limit)))
    nbits = limit + 1
    bits = np.zeros((nbits + 7) // 8, dtype=np.uint8)
    parts: list[np.ndarray] = []
    for lo in range(0, nbits, SEGMENT):
        hi = min(lo + SEGMENT, nbits)          # segment covers n in [lo, hi)
        seg = np.ones(hi - lo, dtype=bool)
        if lo == 0:
            seg[:2] = False
        for p in base:
            p = int(p)
            start = max(p * p, ((lo + p - 1) // p) * p)
            if start < hi:
                seg[start - lo:: p] = False
        pad = (-seg.size) % 8
        packed = np.packbits(np.concatenate([seg, np.zeros(pad, dtype=bool)]) if pad else seg)
        bits[lo // 8: lo // 8 + packed.size] = packed
        parts.append(np.flatnonzero(seg).astype(np.int64) + lo)
    return PrimeTable(limit=limit, bits=bits, primes=np.concatenate(parts))


@dataclass(frozen=True)
class MobiusTable:
    """mu, phi, and smallest prime factor for every n <= limit."""

    limit: int
    mu: np.ndarray               # int8, mu[0] = 0, mu[1] = 1
    phi: np.ndarray              # int64
    smallest_factor: np.ndarray  # int64, smallest_factor[1] = 1

    def factorize(self, n: int) -> list[tuple[int, int]]:
        """Prime factorization [(p, exponent), ...] via the smallest-factor table."""
        if n < 1 or n > self.limit:
            raise ValueError(f"n={n} outside table range [1, {self.limit}]")
        out: list[tuple[int, int]] = []
        while n > 1:
            p = int(self.smallest_factor[n])
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        return out

    def distinct_primes(self, n: int) -> list[int]:
        return [p for p, _ in self.factorize(n)]

    def tau(self, n: int) -> int:
        """Number of divisors."""
        t = 1
        for _, e in self.factorize(n):
            t *= e + 1
        return t

    def is_squarefree(self, n: int) -> bool:
        return self.mu[n] != 0


def sieve_mobius(limit: int) -> MobiusTable:
    """mu / phi / smallest-factor tables, exact for all n <= limit."""
    if limit < 1:
        raise ValueError("limit must be at least 1")
    check_memory(17 * (limit + 1) + SEGMENT, "mobius table")

    spf = np.zeros(limit + 1, dtype=np.int64)
    if limit >= 1:
        spf[1] = 1
    for p in range(2, math.isqrt(limit) + 1):
        if spf[p] == 0:
            spf[p] = p
            sl = spf[p * p:: p]
            sl[sl == 0] = p
    rest = np.flatnonzero(spf[2:] == 0) + 2
    spf[rest] = rest

    primes = np.flatnonzero(spf[2:] == np.arange(2, limit + 1, dtype=np.int64)) + 2
    mu = np.ones(limit + 1, dtype=np.int8)
    mu[0] = 0
    phi = np.arange(limit + 1, dtype=np.int64)
    for p in primes:
        p = int(p)
        mu[p::p] *= -1
        if p <= limit // p:
            mu[p * p:: p * p] = 0
        phi[p::p] = phi[p::p] // p * (p - 1)
    phi[0] = 0
    return MobiusTable(limit=limit, mu=mu, phi=phi, smallest_factor=spf)


@lru_cache(maxsize=4)
def get_prime_table(limit: int) -> PrimeTable:
    return sieve_primes(limit)


@lru_cache(maxsize=4)
def get_mobius_table(limit: int) -> MobiusTable:
    return sieve_mobius(limit)


def trial_factorize(n: int) -> list[tuple[int, int]]:
    """Trial-division factorization; table-free, for witness rechecks."""
    if n < 1:
        raise ValueError("n must be positive")
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            out.append((d, e))
        d += 1 if d == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


def von_mangoldt(n: int) -> float:
    """log p when n is a prime power p^m, else 0."""
    if n < 1:
        raise ValueError("n must be positive")
    if n == 1:
        return 0.0
    fac = trial_factorize(n)
    if len(fac) == 1:
        return math.log(fac[0][0])
    return 0.0


def generalized_von_mangoldt(n: int, k: int, x_cut: float = math.inf,
                             table: MobiusTable | None = None) -> float:
    """Divisor sum of mu(d) (log(n/d))^k over d | n with d <= x_cut.

    With the default x_cut the sum runs over all divisors and vanishes
    whenever n has more than k distinct prime factors; that case returns
    an exact 0.0 rather than a rounding residue.
    """
    if n < 1 or k < 1:
        raise ValueError("need n >= 1 and k >= 1")
    if n == 1:
        return 0.0
    if table is not None and n <= table.limit:
        primes = table.distinct_primes(n)
    else:
        primes = [p for p, _ in trial_factorize(n)]
    full = x_cut >= n
    if full and len(primes) > k:
        return 0.0
    logn = math.log(n)
    parts: list[float] = []

    def expand(i: int, d: int, sign: int) -> None:
        if i == len(primes):
            if d <= x_cut:
                parts.append(sign * (logn - math.log(d)) ** k)
            return
        expand(i + 1, d, sign)
        expand(i + 1, d * primes[i], -sign)

    expand(0, 1, 1)
    return math.fsum(parts)


def lambda_values(limit: int, table: PrimeTable | None = None) -> np.ndarray:
    """Array of von Mangoldt values for n in [0, limit]."""
    pt = table if table is not None and table.limit >= limit else get_prime_table(max(limit, 2))
    check_memory(8 * (limit + 1), "von Mangoldt array")
    lam = np.zeros(limit + 1, dtype=np.float64)
    primes = pt.primes[pt.primes <= limit]
    lam[primes] = np.log(primes.astype(np.float64))
    for p in primes[primes <= math.isqrt(limit)]:
        p = int(p)
        pa = p * p
        lp = math.log(p)
        while pa <= limit:
            lam[pa] = lp
            pa *= p
    return lam


def theta_values(limit: int, table: PrimeTable | None = None) -> np.ndarray:
    """Array with log p at primes p <= limit and 0 elsewhere."""
    pt = table if table is not None and table.limit >= limit else get_prime_table(max(limit, 2))
    check_memory(8 * (limit + 1), "theta array")
    th = np.zeros(limit + 1, dtype=np.float64)
    primes = pt.primes[pt.primes <= limit]
    th[primes] = np.log(primes.astype(np.float64))
    return th


def chebyshev_psi(x: float, table: PrimeTable | None = None) -> float:
    """Partial sum of von_mangoldt(n) over n <= x, computed exactly."""
    if x < 1:
        raise ValueError("x must be at least 1")
    limit = int(math.floor(x))
    if limit < 2:
        return 0.0
    pt = table if table is not None and table.limit >= limit else get_prime_table(limit)
    primes = pt.primes[pt.primes <= limit]
    logs = np.log(primes.astype(np.float64))
    total = math.fsum(
        [float(np.sum(logs[i:i + (1 << 16)])) for i in range(0, logs.size, 1 << 16)]
    )
    # prime powers p^a <= x contribute one extra log p per exponent beyond 1
    extras: list[float] = []
    for p in primes[primes <= math.isqrt(limit)]:
        p = int(p)
        pa = p * p
        while pa <= limit:
            extras.append(math.log(p))
            pa *= p
    return total + math.fsum(extras)
