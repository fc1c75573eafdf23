"""Admissible offset tuples and their singular series.

An offset tuple H = {h_1 < ... < h_k} is admissible when its elements never
occupy all residue classes modulo any prime; equivalently the product
(n+h_1)...(n+h_k) has no fixed prime factor.  The singular series

    S(H) = prod over primes p of (1 - 1/p)^(-k) (1 - nu_p(H)/p),

with nu_p(H) the number of distinct residues of H mod p, predicts the
density of integer n making every n + h_i prime.  S(H) is invariant under
shifting all offsets by a constant and is zero exactly when H is
inadmissible.

The series is evaluated as an exact per-factor product up to a cutoff prime
P chosen so a certified bound on the neglected tail is below the requested
tolerance.  For p beyond the diameter every factor equals
(1 - 1/p)^(-k) (1 - k/p), whose log is bounded by k(k+1)/p^2; the tail sum
of 1/p^2 is bounded both by the integer integral 1/P and by
2*1.25506/(P log P), the latter using the classical bound
pi(x) < 1.25506 x / log x.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np

from .budget import ResourceBudgetError, check_memory
from .arith import get_prime_table

_PI_UPPER = 1.25506          # pi(x) < _PI_UPPER * x / log x for all x > 1
_MAX_CUTOFF = 1 << 33        # singular series sieve capacity guard


@dataclass(frozen=True)
class OffsetTuple:
    """Strictly increasing tuple of distinct integer offsets."""

    offsets: tuple[int, ...]

    def __post_init__(self):
        if len(self.offsets) < 1:
            raise ValueError("need at least one offset")
        if len(set(self.offsets)) != len(self.offsets):
            raise ValueError(f"offsets must be distinct: {self.offsets}")
        object.__setattr__(self, "offsets", tuple(sorted(self.offsets)))

    @classmethod
    def of(cls, *offsets: int) -> "OffsetTuple":
        return cls(tuple(offsets))

    @classmethod
    def parse(cls, text: str) -> "OffsetTuple":
        try:
            return cls(tuple(int(t) for t in text.split(",") if t.strip() != ""))
        except ValueError as exc:
            raise ValueError(f"cannot parse offset list {text!r}: {exc}") from exc

    @property
    def k(self) -> int:
        return len(self.offsets)

    @property
    def diameter(self) -> int:
        return self.offsets[-1] - self.offsets[0]

    def shifted(self, c: int) -> "OffsetTuple":
        return OffsetTuple(tuple(h + c for h in self.offsets))

    def normalized(self) -> "OffsetTuple":
        """Shift so the first offset is 0."""
        return self.shifted(-self.offsets[0])


@dataclass(frozen=True)
class SingularSeriesValue:
    value: float
    truncation_bound: float  # certified absolute error from the neglected tail
    cutoff_prime: int


def residue_count(H: OffsetTuple, p: int) -> int:
    """Number of distinct residue classes of H modulo the prime p."""
    if p < 2:
        raise ValueError("p must be a prime >= 2")
    return len({h % p for h in H.offsets})


def is_admissible(H: OffsetTuple) -> bool:
    """True when no prime p has all p residue classes covered by H.

    Only p <= k can be fully covered, since nu_p(H) <= k.
    """
    for p in _small_primes(H.k):
        if residue_count(H, p) == p:
            return False
    return True


@lru_cache(maxsize=64)
def _small_primes(limit: int) -> tuple[int, ...]:
    if limit < 2:
        return ()
    return tuple(int(p) for p in get_prime_table(limit).primes)


def _tail_log_bound(k: int, cutoff: int) -> float:
    """Certified bound on |sum of log factors| over primes beyond cutoff."""
    per_prime = k * (k + 1)
    integral = 1.0 / cutoff
    pi_based = 2.0 * _PI_UPPER / (cutoff * math.log(cutoff))
    return per_prime * min(integral, pi_based)


def singular_series(H: OffsetTuple, tol: float = 1e-6) -> SingularSeriesValue:
    """Evaluate S(H) with certified truncation error at most tol.

    Inadmissible tuples yield value 0.0 with bound 0.0.  Singletons yield
    exactly 1.0, since every factor is identically 1.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    k = H.k
    if k == 1:
        return SingularSeriesValue(1.0, 0.0, 2)
    for p in _small_primes(k):
        if residue_count(H, p) == p:
            return SingularSeriesValue(0.0, 0.0, p)

    split = max(H.diameter, k * k, 100)
    log_s = _exact_log_product(H, split)
    # upper bound on the true value fixes the log-space error budget
    v0 = math.exp(log_s + _tail_log_bound(k, split))
    target = tol / v0
    cutoff = _solve_cutoff(k, split, target)
    if cutoff > _MAX_CUTOFF:
        raise ResourceBudgetError(
            f"singular series tol={tol} needs primes beyond {_MAX_CUTOFF}")
    if cutoff > split:
        pt = get_prime_table(cutoff)
        big = pt.primes[pt.primes > split].astype(np.float64)
        check_memory(big.nbytes * 3, "singular series factor block")
        terms = -k * np.log1p(-1.0 / big) + np.log1p(-float(k) / big)
        parts = [float(np.sum(terms[i:i + (1 << 16)])) for i in range(0, terms.size, 1 << 16)]
        log_s += math.fsum(parts)
    value = math.exp(log_s)
    bound = value * math.expm1(_tail_log_bound(k, cutoff))
    return SingularSeriesValue(value, bound, cutoff)


def _solve_cutoff(k: int, split: int, target: float) -> int:
    """Smallest convenient cutoff P with _tail_log_bound(k, P) <= target."""
    if _tail_log_bound(k, split) <= target:
        return split
    per_prime = k * (k + 1)
    best = max(split, math.ceil(per_prime / target))  # integer-integral bound
    x = float(best)
    for _ in range(4):  # fixed-point refinement of the pi-based bound
        x = per_prime * 2.0 * _PI_UPPER / (target * math.log(x))
    candidate = max(split + 1, math.ceil(x))
    if candidate < best and _tail_log_bound(k, candidate) <= target:
        best = candidate
    return best


def _exact_log_product(H: OffsetTuple, upto: int) -> float:
    """Sum of log factors over primes p <= upto with nu_p computed directly."""
    k = H.k
    parts = []
    for p in _small_primes(upto):
        nu = residue_count(H, p)
        parts.append(-k * math.log1p(-1.0 / p) + math.log1p(-nu / p))
    return math.fsum(parts)


@dataclass(frozen=True)
class GallagherReport:
    """Singular series averages over all k-tuples drawn from [1, h]."""

    k: int
    h: int
    ordered_sum: float        # over ordered tuples of distinct offsets
    ratio_ordered: float      # ordered_sum / h^k
    set_sum: float            # over unordered offset sets
    ratio_set: float          # set_sum / (h^k / k!)


def gallagher_average(k: int, h: int, tol: float = 1e-6) -> GallagherReport:
    """Average S over the k-element subsets (and ordered tuples) of [1, h].

    The ordered sum is k! times the set sum because S is symmetric in the
    offsets.  Values are cached per shift-normalized gap pattern, which is
    exact: S is shift invariant.
    """
    if k < 1 or h < k:
        raise ValueError("need k >= 1 and h >= k")
    if k >= 4 and h ** k > 10 ** 7:
        raise ResourceBudgetError(f"gallagher average with k={k}, h={h} exceeds the tuple budget")
    if k == 1:
        return GallagherReport(k, h, float(h), float(h) / h, float(h), float(h) / h)

    cache: dict[tuple[int, ...], float] = {}
    parts: list[float] = []
    for combo in combinations(range(1, h + 1), k):
        pattern = tuple(c - combo[0] for c in combo)
        val = cache.get(pattern)
        if val is None:
            val = singular_series(OffsetTuple(pattern), tol).value
            cache[pattern] = val
        parts.append(val)
    set_sum = math.fsum(parts)
    ordered = float(math.factorial(k)) * set_sum
    hk = float(h) ** k
    return GallagherReport(k, h, ordered, ordered / hk, set_sum, set_sum / (hk / math.factorial(k)))


def narrowest_admissible(k: int, diameter_cap: int | None = None) -> OffsetTuple | None:
    """Admissible k-tuple of minimal diameter, first offset 0.

    Diameters are searched in increasing order and offsets in lexicographic
    order, so the result is the lexicographically smallest tuple at the
    minimal diameter; exhausting a diameter certifies no admissible tuple
    exists there.  Returns None when nothing admissible fits under the cap.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > 10:
        raise ValueError("exhaustive search is limited to k <= 10")
    if k == 1:
        return OffsetTuple((0,))
    if diameter_cap is None:
        diameter_cap = max(2 * k, math.ceil(k * (math.log(k) + 2.0)))
    if diameter_cap < k - 1:
        raise ValueError("diameter_cap smaller than k - 1 admits no tuple")

    primes = _small_primes(k)
    for diameter in range(k - 1, diameter_cap + 1):
        found = _search_fixed_diameter(k, diameter, primes)
        if found is not None:
            return OffsetTuple(found)
    return None


def _search_fixed_diameter(k: int, diameter: int, primes: tuple[int, ...]) -> tuple[int, ...] | None:
    """Depth-first search for an admissible tuple 0 = h_1 < ... < h_k = diameter."""
    if k == 2:
        return (0, diameter) if all(len({0 % p, diameter % p}) < p for p in primes) else None

    covered = [{0 % p, diameter % p} for p in primes]
    if any(len(c) == p for c, p in zip(covered, primes)):
        return None
    chosen: list[int] = [0]

    def dfs(pos: int, lo: int) -> tuple[int, ...] | None:
        if pos == k - 1:
            return tuple(chosen) + (diameter,)
        # offsets left to place after this one, excluding the fixed endpoint
        remaining = (k - 1) - pos - 1
        for h in range(lo, diameter - remaining):
            touched = []
            dead = False
            for idx, p in enumerate(primes):
                r = h % p
                if r not in covered[idx]:
                    covered[idx].add(r)
                    touched.append(idx)
                    if len(covered[idx]) == p:
                        dead = True
            if not dead:
                chosen.append(h)
                hit = dfs(pos + 1, h + 1)
                if hit is not None:
                    return hit
                chosen.pop()
            # touched residues were new at this level, so plain removal restores state
            for idx in touched:
                covered[idx].discard(h % primes[idx])
        return None

    return dfs(1, 1)
