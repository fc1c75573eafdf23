"""Weighted positivity forms that detect primes in tuples and windows.

Each detector evaluates a signed quadratic form of the shape

    sum over n of (prime mass at n  -  penalty) * weight(n)^2

whose positivity forces windows or tuples with more primes (or fewer
divisors) than the penalty allows.  Reports carry the total, a labeled
component breakdown whose recombination reproduces the total, and a list
of witnesses: the n achieving the detected event.  Every witness is
re-verified by table-free trial division before it is emitted; a failed
recheck raises VerificationError rather than producing a report.

Positivity is never asserted: these forms go positive only in asymptotic
regimes, so desk-scale runs report the observed sign and the components.
"""

import math
import warnings
from dataclasses import dataclass
from math import comb
from itertools import combinations

import numpy as np

from .accum import block_dot
from .arith import get_mobius_table, lambda_values, theta_values, trial_factorize
from .budget import ResourceBudgetError, VerificationError
from .tuples import OffsetTuple, is_admissible
from .weights import (_build, gpy_weight_interval, iter_squarefree_moduli,
                      lambda_r_interval)


@dataclass(frozen=True)
class DetectorReport:
    form: str
    params: dict
    total: float
    components: dict[str, float]
    positive: bool
    witnesses: list[dict]
    witness_count: int


@dataclass(frozen=True)
class GapScanReport:
    limit: int
    r: int
    threshold: float
    count: int                 # number of gap rows scanned
    min_normalized: float
    min_at: int                # p_n achieving the minimal normalized gap
    min_raw_gap: int           # smallest p_{n+r} - p_n over the whole scan
    proportion_below: float    # fraction of normalized gaps under threshold
    rows: np.ndarray           # (p_n, p_{n+r}, normalized), possibly capped
    rows_capped: bool


def _is_prime_trial(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1 if d == 2 else 2
    return True


def _tau_trial(m: int) -> int:
    """Divisor count by direct trial enumeration; used for witness rechecks."""
    count = 0
    d = 1
    while d * d <= m:
        if m % d == 0:
            count += 2 if d * d != m else 1
        d += 1
    return count


def _psi_window_trial(n: int, h: int) -> float:
    """Trial-division recomputation of sum of von Mangoldt over (n, n+h]."""
    parts = []
    for m in range(n + 1, n + h + 1):
        fac = trial_factorize(m)
        if len(fac) == 1:
            parts.append(math.log(fac[0][0]))
    return math.fsum(parts)


def _resolve_R(N: int, R: float | None, theta: float | None, cap_half: bool = True) -> float:
    if (R is None) == (theta is None):
        raise ValueError("give exactly one of R or theta")
    if theta is not None:
        if not 0 < theta < 1:
            raise ValueError("theta must be in (0, 1)")
        R = float(N) ** theta
    if R < 1:
        raise ValueError("R must be >= 1")
    if cap_half and R > math.sqrt(N) + 1e-9:
        raise ValueError("need R <= sqrt(N)")
    return float(R)


def _windows(values: np.ndarray, N: int, h: int) -> np.ndarray:
    """sum of values over (n, n+h] for each n in (N, 2N]; values[m] is at index m."""
    cs = np.concatenate([[0.0], np.cumsum(values[1:])])
    n = np.arange(N + 1, 2 * N + 1)
    return cs[n + h] - cs[n]


def first_moment_gap(N: int, lambda_param: float, R: float | None = None,
                     theta: float | None = None, threads: int = 1) -> DetectorReport:
    """Nonnegativity bookkeeping for the window approximation error.

    Evaluates the square difference between true and truncated window sums
    over (N, 2N], together with the pieces that bound it from below and the
    single-prime ceiling; a visible contradiction between bound and ceiling
    is what forces windows with two primes.
    """
    R = _resolve_R(N, R, theta)
    h = round(lambda_param * math.log(N))
    if h < 1:
        raise ValueError("lambda log N rounds below 1; nothing to scan")
    lam = lambda_values(2 * N + h)
    lamR = np.concatenate([[0.0], lambda_r_interval(0, 2 * N + h, R, threads).values])
    psi_win = _windows(lam, N, h)
    psiR_win = _windows(lamR, N, h)
    diff = psi_win - psiR_win
    total = block_dot([diff, diff], threads)
    sum_psi_sq = block_dot([psi_win, psi_win], threads)
    cross = block_dot([psi_win, psiR_win], threads)
    sum_psiR_sq = block_dot([psiR_win, psiR_win], threads)
    logN = math.log(N)
    lam_hat = h / logN
    components = {
        "sum_psi_sq": sum_psi_sq,
        "cross": cross,
        "sum_psiR_sq": sum_psiR_sq,
        "empirical_lower_bound": 2.0 * cross - sum_psiR_sq,
        "formula_lower_bound": h * N * math.log(R) + N * float(h) ** 2,
        "asymptotic_lower_bound": (lam_hat / 2.0 + lam_hat ** 2) * N * logN ** 2,
        "single_prime_ceiling": lam_hat * N * logN ** 2,
    }
    params = {
        "N": N, "R": R, "lambda": lambda_param, "h": h, "lambda_realized": lam_hat,
        "threshold_visible": lam_hat > 0.5,
        "numeric_contradiction": components["empirical_lower_bound"] > components["single_prime_ceiling"],
    }
    return DetectorReport("first_moment", params, total, components, total > 0, [], 0)


def mollified_moment(N: int, lambda_param: float, rho: float, C: float,
                     R: float | None = None, theta: float | None = None,
                     threads: int = 1, witness_cap: int = 1000) -> DetectorReport:
    """Mollified window form sum (psi(n,h) - rho log N)(psi_R(n,h) - C)^2.

    A positive total with rho > 1 forces some window (n, n+h] whose von
    Mangoldt mass reaches 2 log N; those n are scanned, re-verified by
    trial division, and reported as witnesses.
    """
    if rho < 0 or C < 0:
        raise ValueError("need rho >= 0 and C >= 0")
    R = _resolve_R(N, R, theta)
    h = round(lambda_param * math.log(N))
    if h < 1:
        raise ValueError("lambda log N rounds below 1; nothing to scan")
    lam = lambda_values(2 * N + h)
    lamR = np.concatenate([[0.0], lambda_r_interval(0, 2 * N + h, R, threads).values])
    psi_win = _windows(lam, N, h)
    molly = _windows(lamR, N, h) - C
    logN = math.log(N)
    total = block_dot([psi_win - rho * logN, molly, molly], threads)
    prime_part = block_dot([psi_win, molly, molly], threads)
    weight_mass = block_dot([molly, molly], threads)
    components = {
        "prime_part": prime_part,
        "weight_mass": weight_mass,
        "penalty": rho * logN * weight_mass,
    }
    witnesses: list[dict] = []
    hits = 0
    if total > 0 and rho > 1:
        target = 2.0 * logN
        idx = np.flatnonzero(psi_win >= target)
        hits = int(idx.size)
        for i in idx[:witness_cap]:
            n = int(N + 1 + i)
            recheck = _psi_window_trial(n, h)
            if recheck < target - 1e-9:
                raise VerificationError(
                    f"window at n={n} reported mass {psi_win[i]:.6f} but recheck gives {recheck:.6f}")
            witnesses.append({"n": n, "event": f"psi window mass {recheck:.6f} >= 2 log N", "verified": True})
    params = {"N": N, "R": R, "lambda": lambda_param, "h": h, "rho": rho, "C": C}
    return DetectorReport("mollified", params, total, components, total > 0, witnesses, hits)


def gpy_form(N: int, h: int, k: int, ell: int, r: int, R: float | None = None,
             theta: float | None = None, threads: int = 1, witness_cap: int = 1000,
             h_cap: int = 50, k_cap: int = 4) -> DetectorReport:
    """Tuple-sum positivity form over all k-subsets of the window [1, h].

    Evaluates sum over N < n <= 2N of
    (sum of theta(n+h0) for h0 <= h  -  r log 3N) * W(n)^2, with W the sum
    of the tuple weights over every k-element subset of {1, ..., h}.
    Witnesses are windows (n, n+h] holding at least r+1 primes.
    """
    if h > h_cap or k > k_cap or k < 1:
        raise ValueError(f"need 1 <= k <= {k_cap} and h <= {h_cap}")
    if comb(h, k) > 10000:
        raise ResourceBudgetError(f"C({h},{k}) = {comb(h, k)} tuple tables exceed the cost budget")
    if r < 0:
        raise ValueError("r must be nonnegative")
    R = _resolve_R(N, R, theta)
    W = np.zeros(N, dtype=np.float64)
    for combo in combinations(range(1, h + 1), k):
        W += gpy_weight_interval(OffsetTuple(combo), ell, N, 2 * N, R, threads=threads).values
    th = theta_values(2 * N + h)
    th_win = _windows(th, N, h)
    penalty_level = r * math.log(3 * N)
    total = block_dot([th_win - penalty_level, W, W], threads)
    prime_mass = block_dot([th_win, W, W], threads)
    weight_mass = block_dot([W, W], threads)
    components = {
        "prime_mass": prime_mass,
        "weight_mass": weight_mass,
        "penalty": penalty_level * weight_mass,
    }
    witnesses, hits = _prime_window_witnesses(N, h, r + 1, witness_cap)
    params = {"N": N, "h": h, "k": k, "ell": ell, "r": r, "R": R}
    return DetectorReport("gpy_sum", params, total, components, total > 0, witnesses, hits)


def _prime_window_witnesses(N: int, h: int, need: int, cap: int) -> tuple[list[dict], int]:
    """Windows (n, n+h], N < n <= 2N, holding at least `need` primes."""
    th = theta_values(2 * N + h)
    ind = (th > 0).astype(np.float64)
    counts = _windows(ind, N, h)
    idx = np.flatnonzero(counts >= need)
    witnesses = []
    for i in idx[:cap]:
        n = int(N + 1 + i)
        ps = [m for m in range(n + 1, n + h + 1) if _is_prime_trial(m)]
        if len(ps) < need:
            raise VerificationError(f"window at n={n} claimed {int(counts[i])} primes, recheck found {len(ps)}")
        witnesses.append({"n": n, "event": f"primes {ps} in ({n}, {n + h}]", "verified": True})
    return witnesses, int(idx.size)


def gs_single_tuple(H: OffsetTuple, ell: int, r: int, N: int, R: float | None = None,
                    theta: float | None = None, threads: int = 1,
                    witness_cap: int = 1000) -> DetectorReport:
    """Single-tuple positivity form with the tuple weight as mollifier.

    Evaluates sum over N < n <= 2N of
    (sum of Lambda(n + h_i)  -  r log 3N) * weight(n)^2.  Witnesses are n
    with at least r+1 of the shifted entries prime.
    """
    if r < 0:
        raise ValueError("r must be nonnegative")
    R = _resolve_R(N, R, theta)
    admissible = is_admissible(H)
    if not admissible:
        warnings.warn(f"offsets {H.offsets} are inadmissible; the form carries no "
                      "prime-detection strength there", stacklevel=2)
    w = gpy_weight_interval(H, ell, N, 2 * N, R, threads=threads).values
    hmax = max(H.offsets[-1], 0)
    lam = lambda_values(2 * N + hmax)
    lam_sum = np.zeros(N, dtype=np.float64)
    for h in H.offsets:
        lo, hi = N + 1 + h, 2 * N + 1 + h
        seg = np.zeros(N, dtype=np.float64)
        a, b = max(lo, 0), min(hi, lam.size)
        if a < b:
            seg[a - lo: b - lo] = lam[a:b]
        lam_sum += seg
    penalty_level = r * math.log(3 * N)
    total = block_dot([lam_sum - penalty_level, w, w], threads)
    prime_mass = block_dot([lam_sum, w, w], threads)
    weight_mass = block_dot([w, w], threads)
    components = {
        "prime_mass": prime_mass,
        "weight_mass": weight_mass,
        "penalty": penalty_level * weight_mass,
    }
    th = theta_values(2 * N + hmax)
    prime_ind = (th > 0)
    tuple_counts = np.zeros(N, dtype=np.int64)
    for h in H.offsets:
        lo, hi = N + 1 + h, 2 * N + 1 + h
        seg = np.zeros(N, dtype=bool)
        a, b = max(lo, 0), min(hi, prime_ind.size)
        if a < b:
            seg[a - lo: b - lo] = prime_ind[a:b]
        tuple_counts += seg
    idx = np.flatnonzero(tuple_counts >= r + 1)
    witnesses = []
    for i in idx[:witness_cap]:
        n = int(N + 1 + i)
        ps = [n + h for h in H.offsets if n + h >= 2 and _is_prime_trial(n + h)]
        if len(ps) < r + 1:
            raise VerificationError(f"tuple at n={n} claimed {int(tuple_counts[i])} primes, recheck found {len(ps)}")
        witnesses.append({"n": n, "event": f"primes {ps} among offsets", "verified": True})
    params = {"H": H.offsets, "ell": ell, "r": r, "N": N, "R": R, "admissible": admissible}
    return DetectorReport("gs_single", params, total, components, total > 0, witnesses, int(idx.size))


def heathbrown_Q(pairs: list[tuple[int, int]], rho: float, x: int,
                 R: float | None = None, threads: int = 1,
                 witness_cap: int = 10000) -> DetectorReport:
    """Divisor-penalty sieve form over the linear forms a_i n + b_i.

    With weights w(n) = sum over squarefree d <= R dividing the product of
    the forms of mu(d) (log(R/d)/log R)^(k+1), evaluates
    Q = Q1 - rho Q2 with Q1 = sum w^2 and Q2 = sum (total divisor count of
    the forms) w^2.  Positivity of Q forces an n whose total divisor count
    stays under 1/rho; candidate n with nonzero weight are scanned and
    re-verified by direct divisor counting regardless of the observed sign.
    """
    if not pairs:
        raise ValueError("need at least one (a, b) pair")
    for a, _ in pairs:
        if a < 1:
            raise ValueError("every a must be >= 1")
    for i in range(len(pairs)):
        for j in range(i + 1, len(pairs)):
            ai, bi = pairs[i]
            aj, bj = pairs[j]
            if ai * bj - aj * bi == 0:
                raise ValueError(f"forms {pairs[i]} and {pairs[j]} are proportional")
    if rho < 0:
        raise ValueError("rho must be nonnegative")
    if R is None:
        R = float(x) ** 0.25
    if R < 2:
        raise ValueError("R must be >= 2")
    k = len(pairs)
    mt = get_mobius_table(max(int(R), max(a * x + b for a, b in pairs)))
    logR = math.log(R)

    def roots_mod(p: int) -> np.ndarray:
        roots: set[int] = set()
        for a, b in pairs:
            if a % p == 0:
                if b % p == 0:
                    return np.arange(p, dtype=np.int64)  # p divides the form identically
            else:
                roots.add((-b) * pow(a, -1, p) % p)
        return np.array(sorted(roots), dtype=np.int64)

    progressions = []
    for d, mu, roots in iter_squarefree_moduli(roots_mod, R, mt):
        progressions.append((d, mu * ((logR - math.log(d)) / logR) ** (k + 1), roots))
    w = _build(0, x, progressions, 1.0, threads)

    narr = np.arange(1, x + 1, dtype=np.int64)
    tau_table = _tau_values(mt, max(a * x + b for a, b in pairs))
    tsum = np.zeros(x, dtype=np.float64)
    for a, b in pairs:
        tsum += tau_table[a * narr + b]
    Q1 = block_dot([w, w], threads)
    Q2 = block_dot([tsum, w, w], threads)
    total = Q1 - rho * Q2
    components = {"Q1": Q1, "Q2": Q2}

    witnesses: list[dict] = []
    hits = 0
    if rho > 0:
        bound = 1.0 / rho
        mask = (w != 0.0) & (tsum < bound)
        idx = np.flatnonzero(mask)
        hits = int(idx.size)
        for i in idx[:witness_cap]:
            n = int(i) + 1
            taus = [_tau_trial(a * n + b) for a, b in pairs]
            if sum(taus) >= bound:
                raise VerificationError(
                    f"witness n={n} has divisor total {sum(taus)}, not below {bound:.6f}")
            witnesses.append({"n": n, "event": f"divisor counts {taus}, total {sum(taus)} < 1/rho",
                              "verified": True})
    params = {"pairs": [list(p) for p in pairs], "rho": rho, "x": x, "R": R, "k": k}
    return DetectorReport("heathbrown", params, total, components, total > 0, witnesses, hits)


def _tau_values(mt, limit: int) -> np.ndarray:
    """Divisor counts tau(m) for m in [0, limit] via the smallest-factor table."""
    tau = np.zeros(limit + 1, dtype=np.int64)
    tau[1] = 1
    spf = mt.smallest_factor
    for m in range(2, limit + 1):
        n, t = m, 1
        while n > 1:
            p = int(spf[n])
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            t *= e + 1
        tau[m] = t
    return tau


def gap_scan(limit: int, r: int = 1, threshold: float = 1.0,
             max_rows: int = 100000) -> GapScanReport:
    """All prime gaps p_{n+r} - p_n up to the limit, normalized by log p_n."""
    if limit < 100:
        raise ValueError("limit must be at least 100")
    if r < 1:
        raise ValueError("r must be >= 1")
    from .arith import get_prime_table

    primes = get_prime_table(limit).primes
    if primes.size <= r:
        raise ValueError("not enough primes below the limit")
    lead = primes[:-r]
    trail = primes[r:]
    gaps = trail - lead
    normalized = gaps / np.log(lead.astype(np.float64))
    imin = int(np.argmin(normalized))
    rows = np.column_stack([lead, trail, normalized])
    capped = rows.shape[0] > max_rows
    return GapScanReport(
        limit=limit, r=r, threshold=threshold, count=int(gaps.size),
        min_normalized=float(normalized[imin]), min_at=int(lead[imin]),
        min_raw_gap=int(gaps.min()),
        proportion_below=float(np.count_nonzero(normalized < threshold)) / gaps.size,
        rows=rows[:max_rows], rows_capped=capped,
    )
