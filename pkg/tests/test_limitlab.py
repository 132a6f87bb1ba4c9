import math
from collections import Counter
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from steinlab import Pmf, Rng, crossing_mean_variance, double_factorial, enumerate_all
from steinlab.diagram import all_partners, sample_partners
from steinlab.limitlab import (
    EmptySample,
    catalan,
    crossing_pmf_exact,
    dkw_radius,
    empirical_kolmogorov,
    exact_kolmogorov_crossings,
    kolmogorov_distance_to_normal,
    normal_cdf,
    poisson_pmf,
    sb_variance_term,
    scfree_bounds,
    simple_chord_free_count,
    simple_chord_pmf_exact,
    stein_normal_bound,
    tv_bound_simple,
    tv_distance_to_poisson,
)
from steinlab.limitlab.distances import poisson_cutoff
from steinlab.statistics import crossings_batch, simple_chords_batch

from conftest import modular_simple


def series_normal_cdf(x, dps=40):
    """1/2 + phi(x) * sum x^(2k+1) / (1*3*...*(2k+1)), in mpmath."""
    with mpmath.workdps(dps):
        x = mpmath.mpf(x)
        term, total, k = x, x, 0
        while abs(term) > mpmath.mpf(10) ** (-dps):
            k += 1
            term *= x * x / (2 * k + 1)
            total += term
        return 0.5 + mpmath.npdf(x) * total


class TestCrossingPmf:
    def test_n3_counts(self):
        assert crossing_pmf_exact(3) == Pmf({0: Fraction(5, 15), 1: Fraction(6, 15),
                                             2: Fraction(3, 15), 3: Fraction(1, 15)})

    def test_n4_noncrossing_mass(self):
        assert crossing_pmf_exact(4)[0] == Fraction(14, 105)

    @pytest.mark.parametrize("n", range(1, 8))
    def test_brute_force_histogram(self, n):
        assert crossing_pmf_exact(n) == Pmf.from_values(crossings_batch(all_partners(n)).tolist())

    @pytest.mark.parametrize("n", range(1, 31))
    def test_moments_and_catalan(self, n):
        pmf = crossing_pmf_exact(n)
        assert (pmf.mean(), pmf.variance()) == crossing_mean_variance(n)
        assert pmf[0] == Fraction(catalan(n), double_factorial(2 * n - 1))
        assert max(pmf.support) == n * (n - 1) // 2


class TestSimpleChordPmf:
    def test_n2(self):
        assert simple_chord_pmf_exact(2) == Pmf({0: Fraction(1, 3), 2: Fraction(2, 3)})

    def test_n1(self):
        assert simple_chord_pmf_exact(1) == Pmf.point_mass(2)

    @pytest.mark.parametrize("n", range(2, 11))
    def test_mean(self, n):
        assert simple_chord_pmf_exact(n).mean() == Fraction(2 * n, 2 * n - 1)

    @pytest.mark.parametrize("n", range(1, 8))
    def test_brute_force_histogram(self, n):
        assert simple_chord_pmf_exact(n) == Pmf.from_values(
            simple_chords_batch(all_partners(n)).tolist())

    @pytest.mark.parametrize("n", range(1, 6))
    def test_against_pair_oracle(self, n):
        values = Counter(modular_simple(d.pairs()) for d in enumerate_all(n))
        assert simple_chord_pmf_exact(n) == Pmf.from_counts(values)


class TestSimpleChordFree:
    @pytest.mark.parametrize("n, expected", [(1, 0), (2, 1), (3, 4)])
    def test_small(self, n, expected):
        assert simple_chord_free_count(n) == expected

    @pytest.mark.parametrize("n", range(1, 8))
    def test_brute_force(self, n):
        values = simple_chords_batch(all_partners(n))
        assert simple_chord_free_count(n) == int((values == 0).sum())
        assert Fraction(simple_chord_free_count(n), double_factorial(2 * n - 1)) == \
            simple_chord_pmf_exact(n)[0]

    @pytest.mark.parametrize("n", range(1, 41))
    def test_bounds(self, n):
        lower, upper = scfree_bounds(n)
        ratio = simple_chord_free_count(n) / double_factorial(2 * n - 1)
        assert lower <= ratio <= upper
        assert upper - lower == pytest.approx(20 / (math.e * n))

    def test_n3_lower_is_vacuous(self):
        lower, _ = scfree_bounds(3)
        assert lower == pytest.approx((math.exp(-1 / 5) - 10 / 3) / math.e)
        assert lower < 0

    def test_approaches_one_over_e(self):
        err = lambda n: abs(simple_chord_free_count(n) * math.e / double_factorial(2 * n - 1) - 1)
        assert err(40) < err(10)


class TestNormalCdf:
    def test_zero(self):
        assert normal_cdf(0.0) == 0.5

    @given(st.floats(-12, 12))
    def test_symmetry(self, x):
        assert abs(normal_cdf(x) + normal_cdf(-x) - 1) <= 1e-12

    def test_196(self):
        assert abs(normal_cdf(1.96) - 0.975002) < 1e-6
        assert abs(normal_cdf(1.96) - float(series_normal_cdf(1.96))) < 1e-7

    @pytest.mark.parametrize("x", [-6.0, -3.3, -1.0, -0.2, 0.7, 2.5, 5.0])
    def test_against_series(self, x):
        assert abs(normal_cdf(x) - float(series_normal_cdf(x, dps=60))) <= 1e-12


class TestPoisson:
    def test_zero(self):
        assert poisson_pmf(1.0, 0) == pytest.approx(math.exp(-1), rel=1e-15)

    @pytest.mark.parametrize("lam", [0.3, 1.0, 4 / 3, 7.5, 30.0])
    def test_normalisation_and_mean(self, lam):
        top = poisson_cutoff(lam)
        probs = [poisson_pmf(lam, k) for k in range(top + 1)]
        assert sum(probs) >= 1 - 1e-12
        assert abs(sum(k * p for k, p in enumerate(probs)) - lam) < 1e-10

    @pytest.mark.parametrize("lam, k", [(1.0, 5), (4 / 3, 12), (30.0, 41)])
    def test_relative_precision(self, lam, k):
        with mpmath.workdps(40):
            exact = mpmath.exp(-lam) * mpmath.mpf(lam) ** k / mpmath.factorial(k)
        assert abs(poisson_pmf(lam, k) / float(exact) - 1) <= 1e-12

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            poisson_pmf(0.0, 1)


class TestKolmogorov:
    def test_point_mass(self):
        assert kolmogorov_distance_to_normal(Pmf.point_mass(0), 0, 1) == pytest.approx(0.5)

    def test_trend(self):
        assert exact_kolmogorov_crossings(30) < exact_kolmogorov_crossings(3)

    @pytest.mark.parametrize("n", range(2, 31))
    def test_bound_and_range(self, n):
        dk = exact_kolmogorov_crossings(n)
        assert 0 <= dk <= min(1.0, 12920 / math.sqrt(n))

    def test_n2_by_hand(self):
        # X_2 is 0 w.p. 2/3 and 1 w.p. 1/3; sigma = sqrt(2)/3
        mu, sigma = 1 / 3, math.sqrt(2) / 3
        z0, z1 = (0 - mu) / sigma, (1 - mu) / sigma
        cands = [abs(2 / 3 - normal_cdf(z0)), normal_cdf(z0),
                 abs(1 - normal_cdf(z1)), abs(2 / 3 - normal_cdf(z1))]
        assert exact_kolmogorov_crossings(2) == pytest.approx(max(cands), abs=1e-15)

    def test_rejects_nonpositive_sigma(self):
        with pytest.raises(ValueError):
            kolmogorov_distance_to_normal(Pmf.point_mass(0), 0, 0)


class TestEmpirical:
    def test_order_invariant(self):
        x = np.random.default_rng(0).normal(size=500)
        assert empirical_kolmogorov(x) == empirical_kolmogorov(np.sort(x))
        assert empirical_kolmogorov(list(x) * 2) == empirical_kolmogorov(np.sort(list(x) * 2))

    def test_empty(self):
        with pytest.raises(EmptySample):
            empirical_kolmogorov([])

    def test_single_point(self):
        assert empirical_kolmogorov([0.0]) == pytest.approx(0.5)

    def test_matches_exact_law(self):
        # empirical law equal to the exact law gives the exact distance
        n = 4
        pmf = crossing_pmf_exact(n)
        mu, var = crossing_mean_variance(n)
        samples = []
        for k, w in pmf.items():
            samples += [(k - float(mu)) / math.sqrt(var)] * int(w * 105)
        assert empirical_kolmogorov(samples) == pytest.approx(exact_kolmogorov_crossings(n), abs=1e-14)

    def test_dkw_small_n(self):
        n, m = 5, 200_000
        mu, var = crossing_mean_variance(n)
        x = (crossings_batch(sample_partners(n, m, Rng(8))) - float(mu)) / math.sqrt(var)
        assert abs(empirical_kolmogorov(x) - exact_kolmogorov_crossings(n)) <= dkw_radius(m, 1e-6)


class TestTotalVariation:
    def test_identical_laws(self):
        top = poisson_cutoff(1.0)
        weights = {k: poisson_pmf(1.0, k) for k in range(top + 1)}
        assert tv_distance_to_poisson(weights, 1.0) < 1e-10

    def test_n2_by_hand(self):
        lam = 4 / 3
        q = [poisson_pmf(lam, k) for k in range(3)]
        expected = 0.5 * (abs(1 / 3 - q[0]) + q[1] + abs(2 / 3 - q[2]) + (1 - sum(q)))
        assert tv_distance_to_poisson(simple_chord_pmf_exact(2), lam) == pytest.approx(expected, abs=1e-13)

    @pytest.mark.parametrize("n", range(2, 11))
    def test_bound(self, n):
        value, err = tv_distance_to_poisson(simple_chord_pmf_exact(n), 2 * n / (2 * n - 1),
                                            with_error=True)
        assert err <= 1e-10
        assert 0 <= value <= 1
        assert value + err <= tv_bound_simple(n)[2]
        assert value + err <= 10 / n


class TestBounds:
    def test_tv_terms(self):
        assert tv_bound_simple(2) == (Fraction(4, 9), Fraction(16, 9), Fraction(20, 9))

    @pytest.mark.parametrize("n", range(1, 200))
    def test_tv_total_below_ten_over_n(self, n):
        a, b, total = tv_bound_simple(n)
        assert a + b == total <= Fraction(10, n)

    def test_tv_scaling(self):
        assert abs(float(tv_bound_simple(10**6)[2]) * 10**6 - 2.5) < 1e-5

    def test_variance_n2(self):
        v = sb_variance_term(2)
        assert v.value == Fraction(2, 9) and v.exact

    @pytest.mark.parametrize("n", range(2, 7))
    def test_variance_constant(self, n):
        v = sb_variance_term(n)
        assert 0 <= v.value <= 432**2 * n
        assert v.max_increment <= 4 * n

    def test_variance_matches_conditional_means(self):
        from steinlab import conditional_mean_increment
        deltas = [conditional_mean_increment(d) for d in enumerate_all(4)]
        m = len(deltas)
        mean = sum(deltas, Fraction(0)) / m
        var = sum((x - mean) ** 2 for x in deltas) / m
        assert sb_variance_term(4).value == var

    def test_monte_carlo_vs_exact(self):
        exact = float(sb_variance_term(5).value)
        mc = sb_variance_term(5, "monte_carlo", outer=3000, inner=32, seed=21)
        assert abs(mc.value - exact) <= 4 * mc.stderr

    def test_monte_carlo_worker_independent(self):
        a = sb_variance_term(6, "monte_carlo", outer=600, inner=16, seed=3, workers=1)
        b = sb_variance_term(6, "monte_carlo", outer=600, inner=16, seed=3, workers=2)
        assert a == b

    def test_rejects(self):
        with pytest.raises(ValueError):
            sb_variance_term(1)
        with pytest.raises(ValueError):
            sb_variance_term(9, "exact")
        with pytest.raises(ValueError):
            sb_variance_term(4, "bogus")

    @pytest.mark.parametrize("n", [2, 3, 10, 100, 10**4, 10**8])
    def test_theoretical_constant(self, n):
        r = stein_normal_bound(n, "theoretical")
        assert r.term1 >= 0 and r.term2 >= 0
        assert r.total == r.term1 + r.term2
        assert r.total <= 12920 * n**-0.5 * (1 + 1e-12)
        assert r.dominates

    @pytest.mark.parametrize("n", range(2, 7))
    def test_empirical_dominates(self, n):
        r = stein_normal_bound(n, "empirical")
        assert r.term1 >= 0 and r.term2 >= 0
        assert r.total >= r.comparison
        assert r.notes["variance_method"] == "exact"
