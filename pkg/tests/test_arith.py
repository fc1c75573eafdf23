import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tuplesieve.arith import (chebyshev_psi, generalized_von_mangoldt, lambda_values,
                              sieve_mobius, sieve_primes, theta_values, trial_factorize,
                              von_mangoldt)
from tuplesieve.budget import ResourceBudgetError


def oracle_factor(n):
    """Trial-division factorization, independent of the package tables."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            out.append((d, e))
        d += 1
    if n > 1:
        out.append((n, 1))
    return out


def oracle_mu(n):
    fac = oracle_factor(n)
    if any(e > 1 for _, e in fac):
        return 0
    return -1 if len(fac) % 2 else 1


def oracle_phi(n):
    result = n
    for p, _ in oracle_factor(n):
        result = result // p * (p - 1)
    return result


def simple_sieve_oracle(limit):
    """Independent list-based sieve for recounts."""
    flags = bytearray([1]) * (limit + 1)
    flags[0] = flags[1] = 0
    for p in range(2, int(limit ** 0.5) + 1):
        if flags[p]:
            flags[p * p:: p] = bytearray(len(range(p * p, limit + 1, p)))
    return flags


EXHAUSTIVE_LIMIT = 10 ** 5


class TestPrimeTable:
    def test_small_exhaustive(self):
        assert sieve_primes(10).primes.tolist() == [2, 3, 5, 7]

    def test_boundary(self):
        pt = sieve_primes(2)
        assert pt.primes.tolist() == [2]
        assert pt.is_prime(2) and not pt.is_prime(1)

    def test_count_to_million_with_recount(self):
        pt = sieve_primes(10 ** 6)
        assert pt.count() == 78498
        # independent recount with a list-based sieve
        flags = simple_sieve_oracle(10 ** 6)
        assert sum(flags) == 78498
        # trial-division checkpoints
        for n in (2, 999983, 999981, 104729, 104730, 524287):
            assert pt.is_prime(n) == (len(oracle_factor(n)) == 1 and oracle_factor(n)[0][1] == 1)

    def test_agrees_with_trial_division_exhaustively(self):
        pt = sieve_primes(EXHAUSTIVE_LIMIT)
        mask = pt.prime_mask(0, EXHAUSTIVE_LIMIT)
        flags = simple_sieve_oracle(EXHAUSTIVE_LIMIT)
        assert np.array_equal(mask, np.frombuffer(bytes(flags), dtype=np.uint8).astype(bool))

    def test_segmented_matches_simple_across_boundaries(self):
        # limit spanning several segments
        limit = (1 << 22) * 2 + 12345
        pt = sieve_primes(limit)
        flags = simple_sieve_oracle(limit)
        assert pt.count() == sum(flags)
        for n in range((1 << 22) - 3, (1 << 22) + 3):
            assert pt.is_prime(n) == bool(flags[n])

    def test_prime_mask_slices(self):
        pt = sieve_primes(1000)
        mask = pt.prime_mask(90, 110)
        assert mask.tolist() == [bool(pt.is_prime(n)) for n in range(90, 111)]

    def test_memory_guard(self, monkeypatch):
        monkeypatch.setenv("TUPLESIEVE_MEM_CAP", "1000")
        with pytest.raises(ResourceBudgetError):
            sieve_primes(10 ** 7)

    def test_bad_limit(self):
        with pytest.raises(ValueError):
            sieve_primes(1)


class TestMobiusTable:
    def test_definition_cases(self):
        mt = sieve_mobius(30)
        assert mt.mu[1] == 1 and mt.mu[4] == 0 and mt.mu[6] == 1 and mt.mu[30] == -1
        assert mt.phi[12] == 4

    def test_mertens_value(self):
        mt = sieve_mobius(10 ** 4)
        brute = sum(oracle_mu(n) for n in range(1, 10 ** 4 + 1))
        assert brute == -23
        assert int(np.sum(mt.mu[1:])) == brute

    def test_exhaustive_against_trial_division(self):
        mt = sieve_mobius(EXHAUSTIVE_LIMIT)
        for n in range(1, EXHAUSTIVE_LIMIT + 1):
            fac = oracle_factor(n) if n > 1 else []
            mu = 0 if any(e > 1 for _, e in fac) else (-1 if len(fac) % 2 else 1)
            if n == 1:
                mu = 1
            assert mt.mu[n] == mu, n
            phi = n
            for p, _ in fac:
                phi = phi // p * (p - 1)
            assert mt.phi[n] == phi, n
            spf = fac[0][0] if fac else 1
            assert mt.smallest_factor[n] == spf, n

    def test_factorize_and_tau(self):
        mt = sieve_mobius(1000)
        assert mt.factorize(360) == [(2, 3), (3, 2), (5, 1)]
        assert mt.tau(360) == 24
        assert mt.factorize(1) == []
        assert mt.tau(1) == 1

    def test_squarefree_flag(self):
        mt = sieve_mobius(100)
        assert mt.is_squarefree(30) and not mt.is_squarefree(12)


class TestVonMangoldt:
    def test_examples(self):
        assert von_mangoldt(8) == pytest.approx(math.log(2), abs=0)
        assert von_mangoldt(12) == 0.0
        assert von_mangoldt(97) == pytest.approx(math.log(97), abs=0)
        assert von_mangoldt(1) == 0.0

    def test_array_matches_scalar(self):
        lam = lambda_values(500)
        for n in range(1, 501):
            assert lam[n] == pytest.approx(von_mangoldt(n), abs=1e-15)

    def test_theta_array(self):
        th = theta_values(100)
        assert th[97] == pytest.approx(math.log(97))
        assert th[8] == 0.0 and th[9] == 0.0


class TestGeneralizedVonMangoldt:
    def test_trivial_cases(self):
        assert generalized_von_mangoldt(1, 3) == 0.0
        assert generalized_von_mangoldt(6, 1) == 0.0  # two distinct prime factors

    def test_direct_enumeration_oracle(self):
        # full divisor sum computed by scanning d | n directly
        for n, k in [(6, 2), (12, 2), (30, 3), (8, 1), (97, 1)]:
            expected = math.fsum(
                oracle_mu(d) * (math.log(n / d)) ** k
                for d in range(1, n + 1) if n % d == 0
            )
            assert generalized_von_mangoldt(n, k) == pytest.approx(expected, abs=1e-12)

    def test_reduces_to_von_mangoldt(self):
        for n in range(2, 2000):
            assert generalized_von_mangoldt(n, 1) == pytest.approx(von_mangoldt(n), abs=1e-10)

    @settings(max_examples=200, deadline=None)
    @given(st.integers(min_value=2, max_value=10 ** 4), st.integers(min_value=1, max_value=4))
    def test_vanishes_beyond_k_distinct_factors(self, n, k):
        omega = len(oracle_factor(n))
        if omega > k:
            assert generalized_von_mangoldt(n, k) == 0.0

    def test_truncated_variant(self):
        # with a divisor cutoff the sum keeps only small-d terms
        n, k = 30, 2
        expected = math.fsum(
            oracle_mu(d) * (math.log(n / d)) ** k
            for d in range(1, n + 1) if n % d == 0 and d <= 6
        )
        assert generalized_von_mangoldt(n, k, x_cut=6) == pytest.approx(expected, rel=1e-12)


class TestChebyshevPsi:
    def test_trivial(self):
        assert chebyshev_psi(1) == 0.0

    def test_enumeration_to_ten(self):
        expected = math.fsum(math.log(x) for x in (2, 3, 2, 5, 7, 2, 3))
        assert chebyshev_psi(10) == pytest.approx(expected, rel=1e-14)

    def test_brute_force_small(self):
        for x in (2, 16, 100, 1000):
            brute = math.fsum(von_mangoldt(n) for n in range(1, int(x) + 1))
            assert chebyshev_psi(x) == pytest.approx(brute, rel=1e-12)

    def test_pnt_band(self):
        for x in (10 ** 5, 10 ** 6):
            assert 0.9 <= chebyshev_psi(x) / x <= 1.1

    def test_near_prime_number_size(self):
        assert abs(chebyshev_psi(10 ** 6) / 10 ** 6 - 1) < 0.003

    def test_nondecreasing(self):
        values = [chebyshev_psi(x) for x in (10, 100, 1000, 10 ** 4)]
        assert values == sorted(values)


def test_trial_factorize_matches_oracle():
    for n in (2, 97, 360, 1024, 99991):
        assert trial_factorize(n) == oracle_factor(n)
