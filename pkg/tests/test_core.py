import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pbratio import (
    DegenerateLambda,
    InvalidLambda,
    ValueOutOfRange,
    make_parameters,
    odds,
    pmf,
    poisson_pmf,
    poisson_tail,
)

from conftest import FIXTURE, FIXTURE_PMF, random_vectors

# exact zeros, or values large enough that products of 30 of them stay normal
probs = st.one_of(st.just(0.0), st.floats(min_value=1e-6, max_value=0.99))
vectors = st.lists(probs, min_size=1, max_size=30).filter(lambda v: sum(v) > 0)


class TestMakeParameters:
    def test_single_bernoulli(self):
        pv = make_parameters([0.5])
        assert pv.lam == 0.5
        assert pv.delta == 0.5
        assert pv.p_star == 0.5
        assert pv.variance == 0.25

    def test_fixture_moments(self):
        pv = make_parameters(FIXTURE)
        assert pv.lam == pytest.approx(0.6, abs=1e-15)
        assert pv.delta == pytest.approx(0.14 / 0.6, abs=1e-15)
        assert pv.p_star == 0.3
        assert pv.support_size == 3

    def test_order_preserved(self):
        assert make_parameters([0.3, 0.1, 0.2]).as_list() == [0.3, 0.1, 0.2]

    @pytest.mark.parametrize("bad", [[0.2, 1.0], [-0.1, 0.5], [0.3, math.nan], [1.5]])
    def test_out_of_range(self, bad):
        with pytest.raises(ValueOutOfRange):
            make_parameters(bad)

    def test_empty(self):
        with pytest.raises(ValueOutOfRange):
            make_parameters([])

    def test_all_zero(self):
        with pytest.raises(DegenerateLambda):
            make_parameters([0.0, 0.0])

    @given(vectors)
    def test_moment_identities(self, values):
        pv = make_parameters(values)
        assert pv.delta <= pv.p_star + 1e-15
        assert pv.delta <= pv.lam + 1e-15
        assert pv.variance == pytest.approx(pv.lam * (1 - pv.delta), rel=1e-12, abs=1e-300)
        np.testing.assert_allclose(pv.q / (1 + pv.q), pv.p, rtol=1e-15, atol=0)


class TestOdds:
    @pytest.mark.parametrize("p, q", [(0.0, 0.0), (0.5, 1.0), (0.3, 3 / 7)])
    def test_values(self, p, q):
        assert odds(make_parameters([p, 0.1]))[0] == pytest.approx(q, rel=1e-15)


class TestPmf:
    def test_single(self):
        np.testing.assert_array_equal(pmf(make_parameters([0.5])).masses, [0.5, 0.5])

    def test_fixture(self):
        np.testing.assert_allclose(pmf(make_parameters(FIXTURE)).masses, FIXTURE_PMF, atol=1e-15, rtol=0)

    def test_zero_entry_keeps_index_and_exact_zero(self):
        b = pmf(make_parameters([0.3, 0.0]))
        assert len(b) == 3
        np.testing.assert_allclose(b.masses, [0.7, 0.3, 0.0], atol=1e-16)
        assert b.masses[2] == 0.0
        assert b.log_masses[2] == -math.inf

    def test_lookup_outside_range_is_zero(self):
        b = pmf(make_parameters([0.3]))
        assert b[-1] == 0.0 and b[5] == 0.0

    @given(vectors, st.randoms(use_true_random=False))
    def test_permutation_invariance(self, values, rnd):
        shuffled = list(values)
        rnd.shuffle(shuffled)
        a = pmf(make_parameters(values)).masses
        b = pmf(make_parameters(shuffled)).masses
        np.testing.assert_allclose(a, b, atol=1e-14, rtol=0)

    @given(vectors)
    def test_support_is_initial_interval(self, values):
        pv = make_parameters(values)
        b = pmf(pv).masses
        assert np.all(b[: pv.support_size + 1] > 0)
        assert np.all(b[pv.support_size + 1 :] == 0)

    @pytest.mark.parametrize("n, p", [(1, 0.3), (7, 0.5), (40, 0.05), (25, 0.97)])
    def test_equal_parameters_match_binomial(self, n, p):
        b = pmf(make_parameters([p] * n)).masses
        expected = [math.comb(n, x) * p**x * (1 - p) ** (n - x) for x in range(n + 1)]
        np.testing.assert_allclose(b, expected, atol=1e-12, rtol=0)

    @pytest.mark.parametrize("n", [10, 1000, 10_000])
    def test_normalization_large_n(self, n):
        p = np.random.default_rng(n).uniform(0, 0.99, size=n)
        assert abs(pmf(make_parameters(p)).total - 1.0) <= 1e-12

    def test_b0_brackets_for_small_lambda(self):
        for values in random_vectors(5, 300, n_range=(1, 30), p_max=0.1):
            pv = make_parameters(values)
            if pv.lam >= 1:
                continue
            b0 = pmf(pv).masses[0]
            assert 1 - pv.lam <= b0 < math.exp(-pv.lam)


class TestPoisson:
    def test_lambda_one(self):
        m = poisson_pmf(1.0, 1).masses
        assert m[0] == pytest.approx(math.exp(-1), rel=1e-15)
        assert m[1] == pytest.approx(math.exp(-1), rel=1e-15)

    def test_values(self):
        np.testing.assert_allclose(
            poisson_pmf(0.6, 3).masses, [0.548812, 0.329287, 0.098786, 0.019757], atol=5e-7
        )
        direct = [math.exp(-0.6) * 0.6**x / math.factorial(x) for x in range(4)]
        np.testing.assert_allclose(poisson_pmf(0.6, 3).masses, direct, rtol=1e-14)

    @pytest.mark.parametrize("lam", [0.01, 0.6, 3.0, 42.0])
    def test_consecutive_ratio(self, lam):
        m = poisson_pmf(lam, 60).masses
        x = np.arange(60)
        # masses near 1e-150 inherit |log pi| * eps relative error from exp
        np.testing.assert_allclose(m[1:] / m[:-1], lam / (x + 1), rtol=1e-12)

    def test_truncated_sum_below_one(self):
        assert poisson_pmf(2.0, 3).total < 1.0

    @pytest.mark.parametrize("lam, x", [(0.6, 3), (5.0, 0), (5.0, 12), (30.0, 10)])
    def test_tail_complements_head(self, lam, x):
        head = math.fsum(math.exp(-lam) * lam**k / math.factorial(k) for k in range(x + 1))
        assert poisson_tail(lam, x) == pytest.approx(1 - head, rel=1e-12, abs=1e-16)

    def test_tail_fixture(self):
        assert poisson_tail(0.6, 3) == pytest.approx(0.003358068853247964, rel=1e-12)

    @pytest.mark.parametrize("lam", [0.0, -1.0, math.inf])
    def test_invalid_lambda(self, lam):
        with pytest.raises(InvalidLambda):
            poisson_pmf(lam, 3)
