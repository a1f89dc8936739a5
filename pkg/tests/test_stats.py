import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ekscatter import (
    ArithmeticRecord,
    EKNormalization,
    EKSample,
    InvalidArgument,
    alpha_constant,
    brute_force_s,
    build_factor_table,
    count_A,
    count_A_via_O,
    count_E,
    ek_samples,
    empirical_cdf,
    histogram,
    ks_distance,
    normalize,
    scan,
    scan_columns,
    std_normal_cdf,
)
from ekscatter.stats import EKSamples, asymptotic_ratio, unimodal_inversions

from oracles import totient_by_gcd, trial_division

TABLE = build_factor_table(100_000)


def normal_cdf_quad(a):
    mpmath.mp.dps = 30
    return float(mpmath.quad(lambda y: mpmath.exp(-y * y / 2), [-mpmath.inf, 0, a]) / mpmath.sqrt(2 * mpmath.pi))


class TestScan:
    def test_q5_and_length(self):
        recs = list(scan(TABLE, 5))
        assert len(recs) == 5
        assert recs[-1] == ArithmeticRecord(5, 4, 2, 3, 1, 1)

    def test_q1(self):
        assert list(scan(TABLE, 1)) == [ArithmeticRecord(1, 1, 1, 1, 0, 0)]

    def test_q61(self):
        assert list(scan(TABLE, 61))[-1] == ArithmeticRecord(61, 60, 2, 31, 1, 3)

    def test_against_brute_force(self):
        for r in scan(TABLE, 400):
            phi = totient_by_gcd(r.q)
            s = brute_force_s(r.q)
            n = (phi + s) // 2
            assert (r.phi, r.s, r.n) == (phi, s, n)
            assert r.omega_n == len(trial_division(n))
            assert r.omega_phi == len(trial_division(phi))

    def test_out_of_range(self):
        with pytest.raises(InvalidArgument):
            list(scan(TABLE, TABLE.limit + 1))

    def test_chunking_is_invisible(self):
        a = list(scan_columns(TABLE, 5000, chunk_size=777))
        b = list(scan_columns(TABLE, 5000))
        for name in a[0]._fields:
            np.testing.assert_array_equal(np.concatenate([getattr(c, name) for c in a]), getattr(b[0], name))

    def test_workers_identical(self):
        serial = list(scan_columns(TABLE, 60_000, chunk_size=7_000))
        parallel = list(scan_columns(TABLE, 60_000, chunk_size=7_000, workers=3))
        assert len(serial) == len(parallel)
        for c1, c2 in zip(serial, parallel):
            for x, y in zip(c1, c2):
                np.testing.assert_array_equal(x, y)

    def test_bad_workers(self):
        with pytest.raises(InvalidArgument):
            list(scan_columns(TABLE, 10, workers=0))


class TestCounts:
    @pytest.mark.parametrize("x, a", [(10, 4), (20, 6), (1, 1), (2, 2)])
    def test_A_examples(self, x, a):
        assert count_A(TABLE, x) == a
        assert count_A_via_O(TABLE, x) == a

    def test_A_by_brute_force(self):
        assert [q for q in range(1, 21) if brute_force_s(q)] == [1, 2, 5, 10, 13, 17]

    def test_A_via_O_includes_25(self):
        assert count_A_via_O(TABLE, 25) - count_A_via_O(TABLE, 24) == 1

    def test_A_two_ways_prefixes(self):
        s = np.array([r.s for r in scan(TABLE, 3000)])
        running = np.cumsum(s != 0)
        for x in (1, 2, 3, 17, 100, 999, 3000):
            assert count_A(TABLE, x) == count_A_via_O(TABLE, x) == running[x - 1]

    @pytest.mark.parametrize("x, e", [(60, 0), (100, 1), (2, 0)])
    def test_E_examples(self, x, e):
        assert count_E(TABLE, x) == e

    def test_E_containment(self):
        for x in (100, 1000, 10_000, 100_000):
            assert count_E(TABLE, x) <= count_A(TABLE, x)

    def test_ratio(self):
        assert asymptotic_ratio(100, 1000, 0.5) == pytest.approx(100 * math.sqrt(math.log(1000)) / 500)


class TestAlpha:
    def test_requires_a_prime(self):
        with pytest.raises(InvalidArgument):
            alpha_constant(4)

    def test_single_factor(self):
        assert alpha_constant(5).value == pytest.approx(3 / (2 * math.pi) * math.sqrt(25 / 24), rel=1e-15)
        assert alpha_constant(12).value == alpha_constant(5).value

    def test_against_mpmath_product(self):
        mpmath.mp.dps = 40
        primes = [p for p in range(5, 10_001, 4) if len(trial_division(p)) == 1 and trial_division(p)[0][1] == 1]
        prod = mpmath.mpf(1)
        for p in primes:
            prod *= (1 - mpmath.mpf(p) ** -2) ** mpmath.mpf(-0.5)
        expected = float(3 / (2 * mpmath.pi) * prod)
        assert alpha_constant(10_000).value == pytest.approx(expected, rel=1e-13)

    def test_monotone_and_bracketed(self):
        limits = [5, 13, 100, 1000, 10_000, 100_000]
        ests = [alpha_constant(p) for p in limits]
        for a, b in zip(ests, ests[1:]):
            assert a.value <= b.value <= a.upper
        assert all(e.tail_bound < 1 / (2 * e.prime_limit) for e in ests)
        assert all(a.tail_bound > b.tail_bound for a, b in zip(ests, ests[1:]))


class TestNormalization:
    def test_requires_cutoff(self):
        with pytest.raises(InvalidArgument):
            EKNormalization.at(15)

    def test_values_at_1e7(self):
        norm = EKNormalization.at(10**7)
        mpmath.mp.dps = 30
        ll = mpmath.log(mpmath.log(10**7))
        assert float(ll) == pytest.approx(2.7799425943, abs=1e-10)
        assert norm.f == pytest.approx(float(ll**2 / 2), rel=1e-14)
        assert norm.g == pytest.approx(float(ll**1.5 / mpmath.sqrt(3)), rel=1e-14)
        assert normalize(0, norm) == pytest.approx(-norm.f / norm.g)
        assert normalize(norm.f + norm.g, norm) == pytest.approx(1.0, abs=1e-15)
        assert normalize(norm.f, norm) == 0.0

    @pytest.mark.parametrize("k", [-1, 0, 1, 2])
    @pytest.mark.parametrize("x", [16, 1000, 10**7, 1e12])
    def test_identity(self, k, x):
        norm = EKNormalization.at(x)
        assert normalize(norm.f + k * norm.g, norm) == pytest.approx(k, abs=1e-14)


class TestCdf:
    def test_examples(self):
        s = [-1.0, 0.0, 1.0]
        assert empirical_cdf(s, 0) == pytest.approx(2 / 3)
        assert empirical_cdf(s, math.inf) == 1.0
        assert empirical_cdf(s, 5) == 1.0
        assert empirical_cdf(s, -1.5) == 0.0
        assert empirical_cdf(s, -1.0) == pytest.approx(1 / 3)

    def test_empty(self):
        with pytest.raises(InvalidArgument):
            empirical_cdf([], 0)

    def test_accepts_ek_samples(self):
        s = [EKSample(1, -1.0), EKSample(2, 0.0), EKSample(3, 1.0)]
        assert empirical_cdf(s, 0.0) == pytest.approx(2 / 3)

    @given(st.lists(st.floats(-10, 10), min_size=1, max_size=50), st.floats(-11, 11), st.floats(-11, 11))
    def test_monotone(self, vals, a, b):
        lo, hi = min(a, b), max(a, b)
        assert 0 <= empirical_cdf(vals, lo) <= empirical_cdf(vals, hi) <= 1

    def test_phi_values(self):
        assert std_normal_cdf(0) == 0.5
        assert std_normal_cdf(1.0) == pytest.approx(normal_cdf_quad(1.0), abs=1e-14)
        assert std_normal_cdf(1.0) == pytest.approx(0.841344746068543, abs=1e-14)

    @given(st.floats(-8, 8))
    def test_phi_symmetry(self, a):
        assert abs(std_normal_cdf(a) + std_normal_cdf(-a) - 1) <= 1e-12


class TestKS:
    def test_single_sample(self):
        assert ks_distance([0.0]) == pytest.approx(0.5, abs=1e-15)

    def test_quantiles(self):
        from statistics import NormalDist

        n = 99
        qs = [NormalDist().inv_cdf(k / (n + 1)) for k in range(1, n + 1)]
        assert ks_distance(qs) <= 2 / (n + 1)

    def test_duplicates_one_jump(self):
        # two copies of 0 and one of 5: the jump at 0 has height 2/3
        d = ks_distance([0.0, 0.0, 5.0])
        assert d == pytest.approx(max(0.5, abs(2 / 3 - 0.5), abs(1 - std_normal_cdf(5))))

    def test_empty(self):
        with pytest.raises(InvalidArgument):
            ks_distance([])


class TestHistogram:
    def test_three_samples(self):
        h = histogram([-1.0, 0.0, 1.0], -2, 2, 4)
        # [-2,-1) [-1,0) [0,1) [1,2): each sample sits on a left edge
        assert h.counts == (0, 1, 1, 1)
        assert h.total == 3 and h.underflow == h.overflow == 0
        assert sum(d * h.width for d in h.densities()) == pytest.approx(1.0)

    def test_no_overlap_goes_to_clamp(self):
        h = histogram([5.0, 6.0, -9.0], -1, 1, 4)
        assert h.overflow == 2 and h.underflow == 1
        assert h.counts == (1, 0, 0, 2)

    def test_right_edge_is_open(self):
        h = histogram([2.0], -2, 2, 4)
        assert h.overflow == 1 and h.counts == (0, 0, 0, 1)

    @pytest.mark.parametrize("lo, hi, bins", [(1, 1, 3), (2, 1, 3), (0, 1, 0)])
    def test_bad_args(self, lo, hi, bins):
        with pytest.raises(InvalidArgument):
            histogram([0.0], lo, hi, bins)

    def test_edges(self):
        h = histogram([0.0], -4, 4, 60)
        assert h.edges()[0] == -4 and h.edges()[-1] == pytest.approx(4)
        assert len(h.counts) == 60


class TestEKSamples:
    def test_requires_cutoff(self):
        with pytest.raises(InvalidArgument):
            ek_samples(TABLE, 15)

    def test_bad_which(self):
        with pytest.raises(InvalidArgument):
            ek_samples(TABLE, 100, "omega")

    def test_first_sample(self):
        s = ek_samples(TABLE, 16)
        norm = EKNormalization.at(16)
        assert len(s) == 16
        assert s[0] == EKSample(1, -norm.f / norm.g)

    def test_columns_match_scan(self):
        recs = list(scan(TABLE, 2000))
        n = ek_samples(TABLE, 2000, "omega_n")
        p = ek_samples(TABLE, 2000, "omega_phi")
        norm = EKNormalization.at(2000)
        assert [s.value for s in n] == pytest.approx([normalize(r.omega_n, norm) for r in recs])
        assert [s.value for s in p] == pytest.approx([normalize(r.omega_phi, norm) for r in recs])
        assert [s.q for s in n] == list(range(1, 2001))

    def test_distinct_summaries_match_plain_lists(self):
        s = ek_samples(TABLE, 50_000)
        plain = s.values.tolist()
        for a in (-2, -0.3, 0, 1.7):
            assert empirical_cdf(s, a) == empirical_cdf(plain, a)
        assert ks_distance(s) == pytest.approx(ks_distance(plain), abs=1e-15)
        assert histogram(s, -4, 4, 60) == histogram(plain, -4, 4, 60)
        mean, var = s.mean_var()
        assert mean == pytest.approx(np.mean(plain)) and var == pytest.approx(np.var(plain))

    def test_distinct_on_raw_container(self):
        norm = EKNormalization.at(100)
        s = EKSamples(np.array([0, 2, 2, 5], dtype=np.int8), norm)
        v, c = s.distinct()
        assert c.tolist() == [1, 2, 1]
        assert v.tolist() == pytest.approx([normalize(k, norm) for k in (0, 2, 5)])


def test_unimodal_inversions():
    assert unimodal_inversions([0, 1, 0, 3, 0, 7, 0, 2, 0, 1]) == 0
    assert unimodal_inversions([1, 3, 2, 5, 1]) == 1
    assert unimodal_inversions([]) == 0
