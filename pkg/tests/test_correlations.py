import math

import pytest
from sympy import divisors, isprime, mobius

from tuplesieve.correlations import (classify_theta_offset, corr_gpy_pair, corr_gpy_theta,
                                     corr_pair, corr_self, hardy_littlewood_count,
                                     second_moment)
from tuplesieve.tuples import OffsetTuple


def oracle_lambda_r(n, R):
    if n < 1:
        return 0.0
    return math.fsum(int(mobius(d)) * math.log(R / d)
                     for d in divisors(n) if d <= R and mobius(d) != 0)


def oracle_von_mangoldt(n):
    if n < 2:
        return 0.0
    fac = [p for p in range(2, n + 1) if n % p == 0 and isprime(p)]
    if len(fac) != 1:
        return 0.0
    m, p = n, fac[0]
    while m % p == 0:
        m //= p
    return math.log(p) if m == 1 else 0.0


class TestCorrSelf:
    def test_brute_force_tiny(self):
        N, R = 100, 10.0
        rr, lr = corr_self(N, R=R)
        brute_rr = math.fsum(oracle_lambda_r(n, R) ** 2 for n in range(1, N + 1))
        brute_lr = math.fsum(oracle_von_mangoldt(n) * oracle_lambda_r(n, R) for n in range(1, N + 1))
        assert rr.empirical == pytest.approx(brute_rr, rel=1e-10)
        assert lr.empirical == pytest.approx(brute_lr, rel=1e-10)
        assert rr.predicted_main == lr.predicted_main == pytest.approx(N * math.log(R))

    def test_r_equals_n_tracks_prime_squares(self):
        # for R = N the mixed sum is essentially sum of (log p)^2 over prime powers
        N = 2000
        _, lr = corr_self(N, R=float(N))
        direct = math.fsum(oracle_von_mangoldt(n) ** 2 for n in range(2, N + 1))
        assert lr.empirical == pytest.approx(direct, rel=1e-9)

    def test_thread_determinism(self):
        a = corr_self(10 ** 5, theta=0.25, threads=1)
        b = corr_self(10 ** 5, theta=0.25, threads=4)
        assert a[0].empirical == b[0].empirical
        assert a[1].empirical == b[1].empirical

    def test_wide_truncation_band_at_a_million(self):
        rr, lr = corr_self(10 ** 6, R=1000.0)
        assert 0.75 <= rr.ratio <= 1.25
        assert 0.75 <= lr.ratio <= 1.25

    def test_validation(self):
        with pytest.raises(ValueError):
            corr_self(100, R=1.5)
        with pytest.raises(ValueError):
            corr_self(100, R=10.0, theta=0.3)
        with pytest.raises(ValueError):
            corr_self(100)


class TestCorrPair:
    def test_odd_shift_prediction_is_exact_zero(self):
        rr, lr = corr_pair(1000, 3, R=10.0)
        assert rr.predicted_main == 0.0 and lr.predicted_main == 0.0
        assert rr.ratio is None and lr.ratio is None

    def test_brute_force_tiny(self):
        N, R, j = 200, 12.0, 2
        rr, lr = corr_pair(N, j, R=R)
        brute_rr = math.fsum(oracle_lambda_r(n, R) * oracle_lambda_r(n + j, R)
                             for n in range(1, N + 1))
        brute_lr = math.fsum(oracle_von_mangoldt(n) * oracle_lambda_r(n + j, R)
                             for n in range(1, N + 1))
        assert rr.empirical == pytest.approx(brute_rr, rel=1e-10)
        assert lr.empirical == pytest.approx(brute_lr, rel=1e-10)

    def test_negative_shift_brute_force(self):
        N, R, j = 150, 9.0, -4
        rr, _ = corr_pair(N, j, R=R)
        brute = math.fsum(oracle_lambda_r(n, R) * oracle_lambda_r(n + j, R)
                          for n in range(1, N + 1) if n + j >= 1)
        assert rr.empirical == pytest.approx(brute, rel=1e-10)

    def test_zero_shift_rejected(self):
        with pytest.raises(ValueError):
            corr_pair(100, 0, R=10.0)

    def test_shift_beyond_R_rejected(self):
        with pytest.raises(ValueError):
            corr_pair(100, 11, R=10.0)

    def test_mixed_ratio_converges(self):
        # the mixed pair ratio approaches 1 from N=1e5 to N=1e6 at fixed theta
        _, lr5 = corr_pair(10 ** 5, 2, theta=0.25)
        _, lr6 = corr_pair(10 ** 6, 2, theta=0.25)
        assert abs(lr6.ratio - 1) <= abs(lr5.ratio - 1)


class TestCorrGpy:
    def test_singleton_reduces_to_self(self):
        N = 10 ** 4
        rr, _ = corr_self(N, theta=0.25)
        g = corr_gpy_pair(OffsetTuple.of(0), 0, OffsetTuple.of(0), 0, N, theta=0.25)
        assert g.empirical == pytest.approx(rr.empirical, rel=1e-12)

    def test_brute_force_per_n_products(self):
        N, R = 2000, 20.0
        H1, H2 = OffsetTuple.of(0, 2), OffsetTuple.of(0, 6)
        rep = corr_gpy_pair(H1, 0, H2, 0, N, R=R)

        def weight(n, H):
            prod_primes = sorted({p for h in H.offsets
                                  for p in range(2, n + h + 1)
                                  if (n + h) % p == 0 and isprime(p)})
            terms = [(1, 1)]
            for p in prod_primes:
                terms += [(d * p, -s) for d, s in terms if d * p <= R]
            k = H.k
            return math.fsum(s * math.log(R / d) ** k for d, s in terms if d <= R) / math.factorial(k)

        brute = math.fsum(weight(n, H1) * weight(n, H2) for n in range(1, N + 1))
        assert rep.empirical == pytest.approx(brute, rel=1e-9)
        assert rep.predicted_main is None and rep.ratio is None

    def test_linear_growth_in_N(self):
        R = 25.0
        a = corr_gpy_pair(OffsetTuple.of(0, 2), 1, OffsetTuple.of(0, 2), 1, 50000, R=R)
        b = corr_gpy_pair(OffsetTuple.of(0, 2), 1, OffsetTuple.of(0, 2), 1, 100000, R=R)
        assert b.empirical / a.empirical == pytest.approx(2.0, rel=0.1)

    def test_size_cap(self):
        with pytest.raises(ValueError):
            corr_gpy_pair(OffsetTuple(tuple_range := tuple(range(12))), 0,
                          OffsetTuple(tuple_range), 0, 10 ** 4, R=10.0)

    def test_r_range_guard(self):
        with pytest.raises(ValueError):
            corr_gpy_pair(OffsetTuple.of(0, 2), 0, OffsetTuple.of(0, 2), 0, 100, R=50.0)


class TestCorrGpyTheta:
    def test_case_classification(self):
        H1, H2 = OffsetTuple.of(0, 2), OffsetTuple.of(0, 6)
        assert classify_theta_offset(H1, H2, 2) == "in_one"
        assert classify_theta_offset(H1, H2, 0) == "in_both"
        assert classify_theta_offset(H1, H2, 4) == "in_neither"

    def test_singleton_reduction_counts_primes(self):
        N, R = 3000, 15.0
        rep = corr_gpy_theta(OffsetTuple.of(0), 0, OffsetTuple.of(0), 0, 0, N, R=R)
        assert rep.params["case"] == "in_both"
        brute = math.fsum(oracle_lambda_r(p, R) ** 2 * math.log(p)
                          for p in range(2, N + 1) if isprime(p))
        assert rep.empirical == pytest.approx(brute, rel=1e-9)

    def test_brute_force(self):
        N, R = 2000, 15.0
        H1, H2 = OffsetTuple.of(0, 2), OffsetTuple.of(0, 4)
        rep = corr_gpy_theta(H1, 1, H2, 0, 2, N, R=R)

        def weight(n, H, ell):
            prod_primes = sorted({p for h in H.offsets
                                  for p in range(2, n + h + 1)
                                  if (n + h) % p == 0 and isprime(p)})
            terms = [(1, 1)]
            for p in prod_primes:
                terms += [(d * p, -s) for d, s in terms if d * p <= R]
            k = H.k
            return math.fsum(s * math.log(R / d) ** (k + ell)
                             for d, s in terms if d <= R) / math.factorial(k + ell)

        brute = math.fsum(
            weight(n, H1, 1) * weight(n, H2, 0) * (math.log(n + 2) if isprime(n + 2) else 0.0)
            for n in range(1, N + 1))
        assert rep.empirical == pytest.approx(brute, rel=1e-9)


class TestHardyLittlewood:
    def test_inadmissible_prediction_zero(self):
        lam, cnt = hardy_littlewood_count(OffsetTuple.of(0, 1), 1000)
        assert lam.predicted_main == 0.0
        assert not lam.params["admissible"]
        # consecutive n, n+1 both prime happens only at (2,3)
        assert cnt.empirical == 1.0

    def test_singleton_is_prime_counting(self):
        lam, cnt = hardy_littlewood_count(OffsetTuple.of(0), 10 ** 5)
        assert lam.ratio == pytest.approx(1.0, abs=5e-3)
        assert cnt.empirical == 9592  # primes below 1e5

    def test_twin_count_against_sieve_oracle(self):
        N = 10 ** 5
        _, cnt = hardy_littlewood_count(OffsetTuple.of(0, 2), N)
        flags = bytearray([1]) * (N + 3)
        flags[0] = flags[1] = 0
        for p in range(2, int((N + 2) ** 0.5) + 1):
            if flags[p]:
                flags[p * p:: p] = bytearray(len(range(p * p, N + 3, p)))
        twin_oracle = sum(1 for n in range(1, N + 1) if flags[n] and flags[n + 2])
        assert cnt.empirical == twin_oracle == 1224

    def test_trend_toward_one(self):
        lam4, _ = hardy_littlewood_count(OffsetTuple.of(0), 10 ** 4)
        lam6, _ = hardy_littlewood_count(OffsetTuple.of(0), 10 ** 6)
        assert abs(lam6.ratio - 1) < abs(lam4.ratio - 1)
        assert abs(lam6.ratio - 1) < 0.005

    def test_small_N_rejected(self):
        with pytest.raises(ValueError):
            hardy_littlewood_count(OffsetTuple.of(0, 2), 5)


class TestSecondMoment:
    def test_zero_window(self):
        rep = second_moment(10 ** 4, 0.01)
        assert rep.empirical == 0.0 and rep.params["h"] == 0

    def test_brute_force_window_recount(self):
        N, lam_param = 1000, 1.0
        rep = second_moment(N, lam_param)
        h = rep.params["h"]
        brute = math.fsum(
            math.fsum(oracle_von_mangoldt(m) for m in range(n + 1, n + h + 1)) ** 2
            for n in range(N + 1, 2 * N + 1))
        assert rep.empirical == pytest.approx(brute, rel=1e-9)

    def test_thread_determinism(self):
        a = second_moment(10 ** 5, 1.0, threads=1)
        b = second_moment(10 ** 5, 1.0, threads=8)
        assert a.empirical == b.empirical

    def test_realized_lambda_in_prediction(self):
        rep = second_moment(10 ** 5, 1.0)
        lam_hat = rep.params["lambda_realized"]
        N = 10 ** 5
        assert rep.predicted_main == pytest.approx((lam_hat + lam_hat ** 2) * N * math.log(N) ** 2)

    def test_validation(self):
        with pytest.raises(ValueError):
            second_moment(1000, 0.0)
        with pytest.raises(ValueError):
            second_moment(1000, 11.0)
