"""Batch evaluation of truncated divisor-sum weights over an interval.

Every weight here is a sum over squarefree d <= R of a coefficient times
the indicator that d divides n (or divides the offset product
P_H(n) = (n+h_1)...(n+h_k)).  Tables are built by the progression sieve:
enumerate each admissible modulus d once, solve d | P_H(n) by combining
the per-prime roots {-h_i mod p} with the Chinese remainder theorem, and
scatter the coefficient along each arithmetic progression hitting the
interval.  The cost is sum over d of (root count) * (length/d + 1), which
beats per-n factorization for long intervals.

Weight kinds:
- lambda_R:        sum_{d | n, d <= R} mu(d) log(R/d)
- lambda_lower_R:  sum_{r <= R} mu^2(r)/phi(r) * sum_{d | (r, n)} d mu(d)
- gpy:             (k+ell)!^-1 sum_{d | P_H(n), d <= R} mu(d) log(R/d)^(k+ell)
- selberg:         sum_{d | P_H(n), d <= R} mu(d) (log(R/d)/log R)^(k+1)
- moment:          windowed k-th moment combination of lambda_R values

Intervals are half-open (start, end]; values[i] is the weight of
n = start + 1 + i.  Per-n accumulation order equals the global modulus
enumeration order in every chunk, so results are bit-identical for any
chunking or thread count.
"""

import json
import math
import struct
import warnings
from dataclasses import dataclass

import numpy as np

from .accum import block_ranges, run_chunks
from .arith import MobiusTable, get_mobius_table
from .budget import check_memory
from .tuples import OffsetTuple

_BINARY_MAGIC = b"TSWT"
_BINARY_VERSION = 1
_CHUNK = 1 << 18


@dataclass(frozen=True)
class RootSystem:
    """Residues r modulo a squarefree d with d | P_H(r)."""

    modulus: int
    roots: np.ndarray  # sorted int64 residues in [0, modulus)

    def count(self) -> int:
        return int(self.roots.size)


@dataclass
class WeightTable:
    """Evaluated weights for n in the half-open interval (start, end]."""

    start: int
    end: int
    R: float
    kind: str
    values: np.ndarray
    offsets: tuple[int, ...] | None = None
    ell: int | None = None
    restriction: int | None = None
    moment_k: int | None = None
    window: int | None = None

    def __len__(self) -> int:
        return self.end - self.start

    def value_at(self, n: int) -> float:
        if not self.start < n <= self.end:
            raise ValueError(f"n={n} outside ({self.start}, {self.end}]")
        return float(self.values[n - self.start - 1])

    def header(self) -> dict:
        head = {"start": self.start, "end": self.end, "R": self.R, "kind": self.kind}
        if self.offsets is not None:
            head["offsets"] = list(self.offsets)
        if self.ell is not None:
            head["ell"] = self.ell
        if self.restriction is not None:
            head["restriction"] = self.restriction
        if self.moment_k is not None:
            head["moment_k"] = self.moment_k
        if self.window is not None:
            head["window"] = self.window
        return head

    def to_csv(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("n,value\n")
            for i, v in enumerate(self.values.tolist()):
                fh.write(f"{self.start + 1 + i},{v!r}\n")

    def to_binary(self, path: str) -> None:
        """Compact dump: magic, version, JSON header length + bytes, raw float64."""
        head = json.dumps(self.header(), sort_keys=True).encode()
        with open(path, "wb") as fh:
            fh.write(_BINARY_MAGIC)
            fh.write(struct.pack("<II", _BINARY_VERSION, len(head)))
            fh.write(head)
            fh.write(np.ascontiguousarray(self.values, dtype="<f8").tobytes())

    @classmethod
    def from_binary(cls, path: str) -> "WeightTable":
        with open(path, "rb") as fh:
            magic = fh.read(4)
            if magic != _BINARY_MAGIC:
                raise ValueError(f"not a weight table dump (magic {magic!r})")
            version, hlen = struct.unpack("<II", fh.read(8))
            if version != _BINARY_VERSION:
                raise ValueError(f"unsupported dump version {version}")
            head = json.loads(fh.read(hlen).decode())
            values = np.frombuffer(fh.read(), dtype="<f8").copy()
        expected = head["end"] - head["start"]
        if values.size != expected:
            raise ValueError(f"dump holds {values.size} values, header promises {expected}")
        return cls(
            start=head["start"], end=head["end"], R=head["R"], kind=head["kind"],
            values=values,
            offsets=tuple(head["offsets"]) if "offsets" in head else None,
            ell=head.get("ell"), restriction=head.get("restriction"),
            moment_k=head.get("moment_k"), window=head.get("window"),
        )


def _prime_roots(p: int, H: OffsetTuple) -> np.ndarray:
    return np.array(sorted({(-h) % p for h in H.offsets}), dtype=np.int64)


def _crt_combine(d1: int, roots1: np.ndarray, d2: int, roots2: np.ndarray) -> np.ndarray:
    """Roots mod d1*d2 from roots mod coprime d1 and d2."""
    inv = pow(d1, -1, d2)
    lift = roots1[:, None] + d1 * (((roots2[None, :] - roots1[:, None]) * inv) % d2)
    return np.sort(lift.ravel())


def root_classes(d: int, H: OffsetTuple, table: MobiusTable | None = None) -> RootSystem:
    """All residues n mod d with d | P_H(n), for squarefree d."""
    if d < 1:
        raise ValueError("d must be positive")
    if d == 1:
        return RootSystem(1, np.zeros(1, dtype=np.int64))
    mt = table if table is not None and table.limit >= d else get_mobius_table(d)
    if mt.mu[d] == 0:
        raise ValueError(f"d={d} is not squarefree")
    mod, roots = 1, np.zeros(1, dtype=np.int64)
    for p in mt.distinct_primes(d):
        roots = _crt_combine(mod, roots, p, _prime_roots(p, H))
        mod *= p
    return RootSystem(d, roots)


def iter_squarefree_moduli(prime_roots, R: float,
                           table: MobiusTable) -> list[tuple[int, int, np.ndarray]]:
    """(d, mu(d), roots mod d) for every squarefree d <= R with d > 1.

    prime_roots(p) supplies the residues modulo p; primes with no residues
    are skipped, since no modulus containing them can divide the target.
    Enumeration order is fixed (depth-first over the increasing prime
    list), which pins the per-n floating accumulation order.
    """
    rmax = int(math.floor(R))
    if rmax < 2:
        return []
    primes = [int(p) for p in np.flatnonzero(
        table.smallest_factor[2:rmax + 1] == np.arange(2, rmax + 1)) + 2]
    per_prime = [(p, prime_roots(p)) for p in primes]
    per_prime = [(p, r) for p, r in per_prime if r.size > 0]
    out: list[tuple[int, int, np.ndarray]] = []

    def extend(idx: int, d: int, mu: int, roots: np.ndarray) -> None:
        for j in range(idx, len(per_prime)):
            p, proots = per_prime[j]
            nd = d * p
            if nd > rmax:
                break
            nroots = _crt_combine(d, roots, p, proots) if d > 1 else np.sort(proots)
            out.append((nd, -mu, nroots))
            extend(j + 1, nd, -mu, nroots)

    extend(0, 1, 1, np.zeros(1, dtype=np.int64))
    return out


def _squarefree_moduli(H: OffsetTuple, R: float, table: MobiusTable) -> list[tuple[int, int, np.ndarray]]:
    return iter_squarefree_moduli(lambda p: _prime_roots(p, H), R, table)


def _scatter(values: np.ndarray, start: int, lo: int, hi: int,
             progressions: list[tuple[int, float, np.ndarray]]) -> None:
    """Add coeff at every n in (lo, hi] with n ≡ root (mod d), for each entry."""
    base = lo + 1 - (start + 1)  # index of n = lo + 1 within values
    length = hi - lo
    view = values[base: base + length]
    for d, coeff, roots in progressions:
        for r in roots:
            first = lo + 1 + ((int(r) - (lo + 1)) % d)
            if first <= hi:
                view[first - (lo + 1):: d] += coeff


def _build(start: int, end: int, progressions: list[tuple[int, float, np.ndarray]],
           base_value: float, threads: int = 1) -> np.ndarray:
    """Fill (start, end] with base_value (the d = 1 term) plus all progressions."""
    if end <= start:
        raise ValueError("need end > start")
    length = end - start
    check_memory(8 * length, "weight table")
    values = np.full(length, base_value, dtype=np.float64)
    ranges = block_ranges(start, end, _CHUNK)
    run_chunks(lambda lo, hi: _scatter(values, start, lo, hi, progressions), ranges, threads)
    if start < 0:
        # the divisor sums are defined on positive n only
        values[: min(end, 0) - start] = 0.0
    return values


def lambda_r_interval(start: int, end: int, R: float, threads: int = 1) -> WeightTable:
    """Truncated von Mangoldt sum over (start, end].

    For 1 < n <= R the value equals von_mangoldt(n) exactly, because the
    moebius sum over all divisors of n cancels the log R term.
    """
    if R < 1:
        raise ValueError("R must be >= 1")
    if R > end:
        warnings.warn(f"R={R} exceeds the interval end {end}; the truncation is vacuous "
                      "and every value reproduces the full divisor sum", stacklevel=2)
    mt = get_mobius_table(max(int(R), 1))
    logR = math.log(R)
    progressions = []
    for d, mu, roots in _squarefree_moduli(OffsetTuple((0,)), R, mt):
        progressions.append((d, mu * (logR - math.log(d)), roots))
    values = _build(start, end, progressions, logR, threads)
    return WeightTable(start, end, float(R), "lambda_R", values)


def lambda_lower_r_interval(start: int, end: int, R: float, threads: int = 1) -> WeightTable:
    """The phi-weighted truncated sum over (start, end].

    Swapping the two defining sums gives, per squarefree d <= R dividing n,
    the coefficient d mu(d) T_d with
    T_d = mu^2(d)/phi(d) * sum over squarefree m <= R/d coprime to d of
    mu^2(m)/phi(m); the d = 1 coefficient is the full mu^2/phi partial sum.
    """
    if R < 1:
        raise ValueError("R must be >= 1")
    rmax = int(math.floor(R))
    mt = get_mobius_table(max(rmax, 1))
    t1 = math.fsum(1.0 / mt.phi[m] for m in range(1, rmax + 1) if mt.mu[m] != 0)
    progressions = []
    for d, mu, roots in _squarefree_moduli(OffsetTuple((0,)), R, mt):
        s_d = math.fsum(
            1.0 / mt.phi[m]
            for m in range(1, rmax // d + 1)
            if mt.mu[m] != 0 and math.gcd(m, d) == 1
        )
        coeff = mu * d * (s_d / mt.phi[d])
        progressions.append((d, coeff, roots))
    values = _build(start, end, progressions, t1, threads)
    return WeightTable(start, end, float(R), "lambda_lower_R", values)


def _gpy_coeff(mu: int, log_ratio: float, power: int) -> float:
    """mu * log_ratio^power / power! with overflow-safe evaluation."""
    if log_ratio <= 0.0:
        return 0.0
    if power <= 30:
        return mu * log_ratio ** power / math.factorial(power)
    return mu * math.exp(power * math.log(log_ratio) - math.lgamma(power + 1))


def gpy_weight_interval(H: OffsetTuple, ell: int, start: int, end: int, R: float,
                        restriction: int | None = None, threads: int = 1) -> WeightTable:
    """Tuple weight (k+ell)!^-1 sum_{d | P_H(n), d <= R} mu(d) log(R/d)^(k+ell).

    With a restriction w, the value is zeroed at every n where some prime
    p <= w divides P_H(n); elsewhere the table is unchanged.
    """
    k = H.k
    if ell < 0 or ell > k:
        raise ValueError("need 0 <= ell <= k")
    power = k + ell
    if power > 150:
        raise ValueError("k + ell beyond 150 overflows the floating normalization")
    if R < 1:
        raise ValueError("R must be >= 1")
    mt = get_mobius_table(max(int(R), 1))
    logR = math.log(R)
    progressions = []
    for d, mu, roots in _squarefree_moduli(H, R, mt):
        progressions.append((d, _gpy_coeff(mu, logR - math.log(d), power), roots))
    values = _build(start, end, progressions, _gpy_coeff(1, logR, power), threads)
    if restriction is not None:
        _apply_restriction(values, start, end, H, restriction)
    return WeightTable(start, end, float(R), "gpy", values,
                       offsets=H.offsets, ell=ell, restriction=restriction)


def _apply_restriction(values: np.ndarray, start: int, end: int, H: OffsetTuple, w: int) -> None:
    """Zero the table wherever gcd(P_H(n), product of primes <= w) > 1."""
    if w < 2:
        return
    pt_primes = get_mobius_table(w)
    primes = np.flatnonzero(
        pt_primes.smallest_factor[2:w + 1] == np.arange(2, w + 1)) + 2
    for p in primes:
        p = int(p)
        for r in _prime_roots(p, H):
            first = start + 1 + ((int(r) - (start + 1)) % p)
            if first <= end:
                values[first - (start + 1):: p] = 0.0


def selberg_weight_interval(H: OffsetTuple, start: int, end: int, R: float,
                            threads: int = 1) -> WeightTable:
    """Sieve weight sum_{d | P_H(n), d <= R} mu(d) (log(R/d)/log R)^(k+1)."""
    if R < 2:
        raise ValueError("R must be >= 2")
    k = H.k
    mt = get_mobius_table(int(R))
    logR = math.log(R)
    progressions = []
    for d, mu, roots in _squarefree_moduli(H, R, mt):
        progressions.append((d, mu * ((logR - math.log(d)) / logR) ** (k + 1), roots))
    values = _build(start, end, progressions, 1.0, threads)
    return WeightTable(start, end, float(R), "selberg", values, offsets=H.offsets)


_SURJECTIONS = {(1, 1): 1, (2, 1): 1, (2, 2): 2, (3, 1): 1, (3, 2): 6, (3, 3): 6}


def moment_weight_interval(k: int, h: int, start: int, end: int, R: float,
                           threads: int = 1) -> WeightTable:
    """k-th-moment window weight built from lambda_R values.

    The sum over all k-component vectors with entries in [1, h], weighted by
    log(R)^(k - #distinct entries) times the product of lambda_R over the
    distinct entries, equals a combination of elementary symmetric functions
    e_m of the window values: sum over m of surj(k, m) log(R)^(k-m) e_m,
    where surj counts surjections from k positions onto m labeled slots.
    """
    if k < 1 or k > 3:
        raise ValueError("moment order is limited to k <= 3")
    if h < 1:
        raise ValueError("h must be >= 1")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # the vacuous-truncation warning is the caller's call
        base = lambda_r_interval(start, end + h, R, threads)
    a = base.values
    logR = math.log(R)
    length = end - start

    def window_power_sum(t: int) -> np.ndarray:
        # sum of a(n+1) .. a(n+h) for each n in (start, end]
        cs = np.concatenate([[0.0], np.cumsum(a ** t)])
        return cs[h + 1: h + 1 + length] - cs[1: 1 + length]

    p1 = window_power_sum(1)
    e = {1: p1}
    if k >= 2:
        p2 = window_power_sum(2)
        e[2] = (p1 ** 2 - p2) / 2.0
    if k >= 3:
        p3 = window_power_sum(3)
        e[3] = (p1 ** 3 - 3.0 * p1 * p2 + 2.0 * p3) / 6.0
    values = np.zeros(length, dtype=np.float64)
    for m in range(1, k + 1):
        values += _SURJECTIONS[(k, m)] * logR ** (k - m) * e[m]
    return WeightTable(start, end, float(R), "moment", values, moment_k=k, window=h)
