import numpy as np
import pytest

from tuplesieve.almost_primes import e2_gap_stats, e2_sieve


def oracle_is_two_distinct_primes(n):
    fac = []
    m, d = n, 2
    while d * d <= m:
        if m % d == 0:
            e = 0
            while m % d == 0:
                m //= d
                e += 1
            fac.append((d, e))
        d += 1
    if m > 1:
        fac.append((m, 1))
    return len(fac) == 2 and all(e == 1 for _, e in fac)


class TestE2Sieve:
    def test_first_entries(self):
        assert e2_sieve(25).values.tolist() == [6, 10, 14, 15, 21, 22]

    def test_prime_powers_and_higher_multiplicity_excluded(self):
        vals = set(e2_sieve(100).values.tolist())
        assert 4 not in vals and 9 not in vals and 12 not in vals and 25 not in vals
        assert 6 in vals and 95 in vals

    def test_count_matches_trial_division_oracle(self):
        table = e2_sieve(10 ** 4)
        oracle = sum(1 for n in range(6, 10 ** 4 + 1) if oracle_is_two_distinct_primes(n))
        assert table.values.size == oracle

    def test_every_member_verified_exhaustively(self):
        table = e2_sieve(10 ** 5)
        assert all(oracle_is_two_distinct_primes(int(v)) for v in table.values)
        assert np.all(np.diff(table.values) > 0)

    def test_validation(self):
        with pytest.raises(ValueError):
            e2_sieve(5)


class TestE2Gaps:
    def test_first_gap(self):
        rep = e2_gap_stats(1000, 1)
        vals = e2_sieve(1000).values
        assert vals[1] - vals[0] == 4  # 10 - 6

    def test_consecutive_run_of_three(self):
        # 33 = 3*11, 34 = 2*17, 35 = 5*7 give back-to-back unit gaps
        vals = e2_sieve(100).values.tolist()
        i = vals.index(33)
        assert vals[i + 1] == 34 and vals[i + 2] == 35
        rep = e2_gap_stats(100, 1)
        assert rep.min_gap == 1

    def test_histogram_counts_sum(self):
        for r in (1, 2, 3):
            rep = e2_gap_stats(10 ** 4, r)
            table = e2_sieve(10 ** 4)
            assert sum(rep.histogram.values()) == table.values.size - r
            assert rep.count == table.values.size - r

    def test_min_gap_at_least_one(self):
        rep = e2_gap_stats(10 ** 4, 1)
        assert rep.min_gap >= 1

    def test_leq6_count_nondecreasing_in_limit(self):
        a = e2_gap_stats(10 ** 4, 1).consecutive_leq6
        b = e2_gap_stats(10 ** 5, 1).consecutive_leq6
        assert b >= a

    def test_validation(self):
        with pytest.raises(ValueError):
            e2_gap_stats(50, 1)
        with pytest.raises(ValueError):
            e2_gap_stats(1000, 0)
