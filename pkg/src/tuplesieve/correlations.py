"""Empirical correlation sums against their predicted main terms.

Each experiment sums a product of arithmetic weights over an integer range
and, where a classical main term exists, reports the ratio of the empirical
sum to it:

- pair:          sum_{n<=N} Lambda_R(n) Lambda_R(n+j)   ~ S({0,j}) N
                 sum_{n<=N} Lambda(n) Lambda_R(n+j)     ~ S({0,j}) N
- self:          sum_{n<=N} Lambda_R(n)^2 ~ N log R,
                 sum_{n<=N} Lambda(n) Lambda_R(n) ~ N log R
- gpy pair:      sum_{n<=N} of two tuple weights; no main term is asserted,
                 the raw value is reported for oracle cross-validation
- gpy theta:     the same with an extra prime indicator at n + h0
- tuple count:   sum_{n<=N} Lambda(n+h_1)...Lambda(n+h_k) ~ S(H) N, plus the
                 plain count of n with every n+h_i prime against
                 S(H) * sum 1/(log n)^k
- second moment: sum_{N<n<=2N} (psi(n+h) - psi(n))^2 against the Poisson
                 prediction (lam + lam^2) N (log N)^2 with lam = h / log N

Sums are reduced blockwise with an exact merge, so results are bit-identical
for any thread count.
"""

import math
from dataclasses import dataclass

import numpy as np

from .accum import block_dot, block_sum
from .arith import get_prime_table, lambda_values, theta_values
from .tuples import OffsetTuple, is_admissible, singular_series
from .weights import gpy_weight_interval, lambda_r_interval


@dataclass(frozen=True)
class CorrelationReport:
    kind: str
    N: int
    R: float | None
    params: dict
    empirical: float
    predicted_main: float | None = None
    ratio: float | None = None

    @staticmethod
    def build(kind: str, N: int, R: float | None, params: dict,
              empirical: float, predicted: float | None) -> "CorrelationReport":
        ratio = empirical / predicted if predicted else None
        return CorrelationReport(kind, N, R, dict(params), empirical, predicted, ratio)


def _resolve_R(N: int, R: float | None, theta: float | None) -> float:
    if (R is None) == (theta is None):
        raise ValueError("give exactly one of R or theta")
    if theta is not None:
        if not 0 < theta < 1:
            raise ValueError("theta must be in (0, 1)")
        return float(N) ** theta
    if R < 1:
        raise ValueError("R must be >= 1")
    return float(R)


def corr_pair(N: int, shift: int, R: float | None = None, theta: float | None = None,
              tol: float = 1e-6, threads: int = 1) -> tuple[CorrelationReport, CorrelationReport]:
    """Shifted pair correlations of the truncated sum, plus the mixed variant."""
    if shift == 0:
        raise ValueError("shift must be nonzero; use corr_self for the diagonal")
    R = _resolve_R(N, R, theta)
    if abs(shift) > R or R > N:
        raise ValueError("need 0 < |shift| <= R <= N")
    hi = N + max(shift, 0)
    lam = lambda_values(hi)
    lamR = lambda_r_interval(0, hi, R, threads).values  # index n-1
    lo_n = max(1, 1 - shift)
    a = lamR[lo_n - 1: N]
    b = lamR[lo_n + shift - 1: N + shift]
    amix = lam[lo_n: N + 1]
    emp_rr = block_dot([a, b], threads)
    emp_lr = block_dot([amix, b], threads)
    pred = singular_series(OffsetTuple.of(0, abs(shift)), tol).value * N
    params = {"shift": shift}
    return (
        CorrelationReport.build("pair_rr", N, R, params, emp_rr, pred),
        CorrelationReport.build("pair_lr", N, R, params, emp_lr, pred),
    )


def corr_self(N: int, R: float | None = None, theta: float | None = None,
              threads: int = 1) -> tuple[CorrelationReport, CorrelationReport]:
    """Diagonal second moments of the truncated sum against N log R."""
    R = _resolve_R(N, R, theta)
    if R < 2 or R > N:
        raise ValueError("need 2 <= R <= N")
    lam = lambda_values(N)
    lamR = lambda_r_interval(0, N, R, threads).values
    emp_rr = block_dot([lamR, lamR], threads)
    emp_lr = block_dot([lam[1:], lamR], threads)
    pred = N * math.log(R)
    return (
        CorrelationReport.build("self_rr", N, R, {}, emp_rr, pred),
        CorrelationReport.build("self_lr", N, R, {}, emp_lr, pred),
    )


def corr_gpy_pair(H1: OffsetTuple, ell1: int, H2: OffsetTuple, ell2: int,
                  N: int, R: float | None = None, theta: float | None = None,
                  size_cap: int = 20, threads: int = 1) -> CorrelationReport:
    """Raw correlation of two tuple weights over n <= N.

    No main term is reported: the classical asymptotics for this sum are
    not part of this workbench, so only the empirical value (validated by
    brute-force oracles in the tests) is exposed.
    """
    R = _resolve_R(N, R, theta)
    if R > math.sqrt(N) + 1e-9:
        raise ValueError("need R <= sqrt(N)")
    if H1.k + H2.k + ell1 + ell2 > size_cap:
        raise ValueError(f"combined tuple size exceeds cap {size_cap}")
    w1 = gpy_weight_interval(H1, ell1, 0, N, R, threads=threads).values
    w2 = gpy_weight_interval(H2, ell2, 0, N, R, threads=threads).values
    emp = block_dot([w1, w2], threads)
    params = {"H1": H1.offsets, "ell1": ell1, "H2": H2.offsets, "ell2": ell2}
    return CorrelationReport.build("gpy_pair", N, R, params, emp, None)


def classify_theta_offset(H1: OffsetTuple, H2: OffsetTuple, h0: int) -> str:
    in1, in2 = h0 in H1.offsets, h0 in H2.offsets
    if in1 and in2:
        return "in_both"
    if in1 or in2:
        return "in_one"
    return "in_neither"


def corr_gpy_theta(H1: OffsetTuple, ell1: int, H2: OffsetTuple, ell2: int, h0: int,
                   N: int, R: float | None = None, theta: float | None = None,
                   size_cap: int = 20, threads: int = 1) -> CorrelationReport:
    """Tuple-weight correlation with a prime log factor at n + h0."""
    R = _resolve_R(N, R, theta)
    if R > math.sqrt(N) + 1e-9:
        raise ValueError("need R <= sqrt(N)")
    if H1.k + H2.k + ell1 + ell2 > size_cap:
        raise ValueError(f"combined tuple size exceeds cap {size_cap}")
    w1 = gpy_weight_interval(H1, ell1, 0, N, R, threads=threads).values
    w2 = gpy_weight_interval(H2, ell2, 0, N, R, threads=threads).values
    th = theta_values(N + max(h0, 0))[1 + h0: N + 1 + h0] if h0 >= 0 else \
        np.concatenate([np.zeros(-h0), theta_values(N + h0)[1: N + 1 + h0]])
    emp = block_dot([w1, w2, th], threads)
    params = {"H1": H1.offsets, "ell1": ell1, "H2": H2.offsets, "ell2": ell2,
              "h0": h0, "case": classify_theta_offset(H1, H2, h0)}
    return CorrelationReport.build("gpy_theta", N, R, params, emp, None)


def _padded_slice(arr: np.ndarray, lo: int, hi: int) -> np.ndarray:
    """arr[lo:hi] with zero fill where the indices fall outside the array."""
    out = np.zeros(hi - lo, dtype=arr.dtype)
    a, b = max(lo, 0), min(hi, arr.size)
    if a < b:
        out[a - lo: b - lo] = arr[a:b]
    return out


def hardy_littlewood_count(H: OffsetTuple, N: int, tol: float = 1e-6,
                           threads: int = 1) -> tuple[CorrelationReport, CorrelationReport]:
    """Weighted tuple sum against S(H) N, and the plain prime-tuple count.

    The count variant compares the number of n <= N with every n + h_i
    prime against S(H) * sum_{3<=n<=N} (log n)^-k.  Offsets may be negative;
    terms with n + h_i < 1 contribute zero.
    """
    if N < 10:
        raise ValueError("N must be at least 10")
    hmax = H.offsets[-1]
    lam = lambda_values(N + max(hmax, 0))
    emp = block_dot([_padded_slice(lam, 1 + h, N + 1 + h) for h in H.offsets], threads)
    sing = singular_series(H, tol).value
    pred = sing * N

    pt = get_prime_table(N + max(hmax, 0))
    full = pt.prime_mask(0, N + max(hmax, 0))
    mask = np.ones(N, dtype=bool)
    for h in H.offsets:
        mask &= _padded_slice(full, 1 + h, N + 1 + h)
    count = int(np.count_nonzero(mask))
    ns = np.arange(3, N + 1, dtype=np.float64)
    pred_count = sing * block_sum(np.log(ns) ** (-float(H.k)))
    params = {"H": H.offsets, "admissible": is_admissible(H)}
    return (
        CorrelationReport.build("hl_lambda", N, None, params, emp, pred),
        CorrelationReport.build("hl_count", N, None, params, float(count), pred_count),
    )


def second_moment(N: int, lambda_param: float, threads: int = 1) -> CorrelationReport:
    """Second moment of prime counts in windows of length ~ lambda log N.

    Sums (psi(n+h) - psi(n))^2 over N < n <= 2N with h = round(lambda log N)
    and compares with (lam + lam^2) N (log N)^2 at the realized
    lam = h / log N.
    """
    if not 0 < lambda_param <= 10:
        raise ValueError("lambda_param must be in (0, 10]")
    h = round(lambda_param * math.log(N))
    if h <= 0:
        return CorrelationReport.build(
            "second_moment", N, None,
            {"lambda": lambda_param, "h": 0, "lambda_realized": 0.0}, 0.0, None)
    lam = lambda_values(2 * N + h)
    cs = np.concatenate([[0.0], np.cumsum(lam[1:])])  # cs[x] = psi(x)
    n = np.arange(N + 1, 2 * N + 1)
    win = cs[n + h] - cs[n]
    emp = block_dot([win, win], threads)
    lam_hat = h / math.log(N)
    pred = (lam_hat + lam_hat ** 2) * N * math.log(N) ** 2
    params = {"lambda": lambda_param, "h": h, "lambda_realized": lam_hat}
    return CorrelationReport.build("second_moment", N, None, params, emp, pred)
