import math

import numpy as np
import pytest

from pbratio import (
    EmptyGrid,
    ScaleOutOfRange,
    UnsupportedPoint,
    envelope,
    eval_L,
    eval_L_prime,
    make_parameters,
    ratio_profile,
)
from pbratio.oracle import brute_log_ratio_on_ray
from pbratio.ray import default_grid, derivative_forms

from conftest import FIXTURE, random_vectors


def test_t_one_is_plain_log_ratio():
    pv = make_parameters([0.4, 0.8, 0.3, 0.6])
    prof = ratio_profile(pv)
    for x in range(1, pv.ceil_lam + 1):
        assert eval_L(pv, x, 1.0) == prof.log_r[x]


def test_fixture_value():
    assert eval_L(make_parameters(FIXTURE), 1, 1.0) == pytest.approx(math.log(1.2086721375923708), rel=1e-13)


def test_matches_explicit_form():
    for values in random_vectors(41, 40, n_range=(1, 10), p_max=0.95):
        pv = make_parameters(values)
        for t in (1e-3, 0.3, 0.77, 1.0):
            for x in range(1, pv.ceil_lam + 1):
                assert eval_L(pv, x, t) == pytest.approx(
                    brute_log_ratio_on_ray(pv, x, t), rel=1e-10, abs=1e-13
                )


def test_slope_at_origin_is_delta():
    for values in random_vectors(42, 30, n_range=(1, 20), p_max=0.9):
        pv = make_parameters(values)
        t = 1e-6
        assert 0.9 * pv.delta <= eval_L(pv, 1, t) / t <= 1.1 * pv.delta


def test_single_bernoulli_is_linear():
    pv = make_parameters([0.5])
    for t in np.linspace(0.01, 1, 17):
        assert eval_L(pv, 1, t) == pytest.approx(0.5 * t, abs=1e-15)
        assert eval_L_prime(pv, 1, t) == 0.5


@pytest.mark.parametrize("t", [0.0, -0.2, 1.0000001, math.nan])
def test_scale_out_of_range(t):
    with pytest.raises(ScaleOutOfRange):
        eval_L(make_parameters(FIXTURE), 1, t)


def test_unsupported_point():
    with pytest.raises(UnsupportedPoint):
        eval_L(make_parameters([0.3, 0.0]), 2, 0.5)


def test_derivative_forms_agree():
    for values in random_vectors(43, 50, n_range=(1, 30), p_max=0.95):
        pv = make_parameters(values)
        for t in (1e-4, 0.1, 0.5, 1.0):
            for x in range(1, pv.ceil_lam + 1):
                a, b = derivative_forms(pv, x, t)
                assert abs(a - b) <= 1e-10 * max(1.0, abs(a), abs(b))


def test_derivative_near_origin_matches_finite_difference():
    for values in random_vectors(44, 30, n_range=(1, 20), p_max=0.9):
        pv = make_parameters(values)
        t, h = 1e-4, 1e-5
        fd = (eval_L(pv, 1, t + h) - eval_L(pv, 1, t - h)) / (2 * h)
        assert fd == pytest.approx(eval_L_prime(pv, 1, t), rel=1e-6)


class TestEnvelope:
    def test_default_grid(self):
        g = default_grid()
        assert len(g) == 101 and g[0] == 1e-4 and g[-1] == 1.0

    def test_endpoint_and_origin(self):
        for values in random_vectors(45, 30, n_range=(1, 30), p_max=0.6):
            pv = make_parameters(values)
            prof = envelope(pv)
            assert prof.f[-1] == ratio_profile(pv).log_rho
            if pv.lam <= 10:
                assert prof.f[0] < 1e-3

    def test_window_equals_full_scan(self):
        for values in random_vectors(46, 30, n_range=(1, 40), p_max=0.99):
            prof = envelope(make_parameters(values))
            np.testing.assert_array_equal(prof.f, prof.f_full)

    def test_concavity(self):
        for values in random_vectors(47, 30, n_range=(1, 30), p_max=0.95):
            prof = envelope(make_parameters(values))
            assert np.all(prof.second_differences() <= 1e-10)

    def test_sign_equivalence(self):
        for values in random_vectors(48, 30, n_range=(2, 30), p_max=0.95):
            pv = make_parameters(values)
            prof = envelope(pv, np.linspace(0.05, 1, 20))
            for i, t in enumerate(prof.t_grid):
                for j, x in enumerate(prof.xs):
                    nxt = eval_L(pv, x + 1, t) if x + 1 <= pv.support_size else -math.inf
                    d = prof.L_prime[i, j]
                    diff = prof.L[i, j] - nxt
                    if abs(d) > 1e-12:
                        assert np.sign(d) == np.sign(diff)

    def test_small_lambda_monotone_flag(self):
        prof = envelope(make_parameters([0.1, 0.2, 0.3]))
        assert prof.xs == (1,)
        assert prof.nondecreasing
        assert all(a == (1,) for a in prof.envelope_argmax)

    def test_bad_grids(self):
        pv = make_parameters(FIXTURE)
        with pytest.raises(EmptyGrid):
            envelope(pv, [])
        with pytest.raises(EmptyGrid):
            envelope(pv, [0.5, 0.2])
        with pytest.raises(ScaleOutOfRange):
            envelope(pv, [0.5, 1.5])
