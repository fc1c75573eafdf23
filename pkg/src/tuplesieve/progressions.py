"""Primes in arithmetic progressions and the level-of-distribution probe.

Theta(N; q, a) sums log p over primes p <= N with p ≡ a (mod q).  The probe
accumulates, for each modulus q <= Q, the worst-case error over reduced
residues E(N; q) = max over (a,q)=1 of |Theta(N;q,a) - N/phi(q)|, reporting
the total and the normalized value total * (log N)^A / N.

Partition exactness: each log p (a float64 in [1/2, 2^11)) is an exact
integer multiple of 2^-53, so class sums accumulate as Python integers in
units of 2^-53.  Summed over any residue partition these integers add to
the integer total exactly, which makes the partition identity testable at
full strength; the float view rounds once at the end.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .arith import get_mobius_table, get_prime_table
from .budget import check_memory

_SCALE_BITS = 53


@lru_cache(maxsize=4)
def _scaled_logs(N: int) -> tuple[np.ndarray, np.ndarray]:
    """(primes <= N, log p scaled by 2^53 as exact int64)."""
    primes = get_prime_table(N).primes
    primes = primes[primes <= N]
    logs = np.log(primes.astype(np.float64))
    scaled = (logs * float(1 << _SCALE_BITS)).astype(np.int64)
    return primes, scaled


def theta_scaled_class_sums(N: int, q: int) -> list[int]:
    """Exact per-class sums of log p in units of 2^-53, one per residue a."""
    if q < 1:
        raise ValueError("q must be >= 1")
    primes, scaled = _scaled_logs(N)
    sums = [0] * q
    residues = (primes % q).tolist()
    for r, s in zip(residues, scaled.tolist()):
        sums[r] += s
    return sums


def theta_progression(N: int, q: int, a: int) -> float:
    """Sum of log p over primes p <= N with p ≡ a (mod q)."""
    if q < 1 or not 0 <= a < q:
        raise ValueError("need q >= 1 and 0 <= a < q")
    return math.ldexp(float(theta_scaled_class_sums(N, q)[a]), -_SCALE_BITS)


@dataclass(frozen=True)
class LevelProbeReport:
    N: int
    Q: int
    A: float
    per_q: np.ndarray       # E(N; q) for q = 1..Q
    total: float
    normalized: float       # total * (log N)^A / N
    alpha: float | None = None


def bv_sum(N: int, Q: int, A: float = 1.0, alpha: float | None = None) -> LevelProbeReport:
    """Summed worst-case progression error over moduli q <= Q.

    Only reduced residues enter the per-q maximum.  One vectorized pass per
    q bins the shared prime list by residue class, so the total cost is
    O(pi(N) * Q) array work.
    """
    if not 1 <= Q <= N:
        raise ValueError("need 1 <= Q <= N")
    check_memory(16 * Q + 8 * get_prime_table(N).primes.size, "level probe")
    primes, _ = _scaled_logs(N)
    logs = np.log(primes.astype(np.float64))
    mt = get_mobius_table(Q)
    per_q = np.zeros(Q, dtype=np.float64)
    for q in range(1, Q + 1):
        sums = np.bincount((primes % q).astype(np.int64), weights=logs, minlength=q)
        coprime = np.gcd(np.arange(q, dtype=np.int64), q) == 1
        expected = N / float(mt.phi[q])
        per_q[q - 1] = float(np.max(np.abs(sums[coprime] - expected)))
    total = math.fsum(per_q.tolist())  # exactly rounded, so total == sum of entries
    normalized = total * math.log(N) ** A / N
    return LevelProbeReport(N=N, Q=Q, A=A, per_q=per_q, total=total,
                            normalized=normalized, alpha=alpha)


def level_probe(N: int, alphas: list[float], A: float = 1.0) -> list[LevelProbeReport]:
    """bv_sum at Q = floor(N^alpha) for each exponent alpha."""
    reports = []
    for alpha in alphas:
        if not 0 < alpha < 1:
            raise ValueError(f"alpha={alpha} must be in (0, 1)")
        Q = max(1, int(float(N) ** alpha))
        reports.append(bv_sum(N, Q, A=A, alpha=alpha))
    return reports
