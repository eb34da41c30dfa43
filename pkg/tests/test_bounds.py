import logging
import math

import pytest

from pbratio import bound_report, conjecture_gap, make_parameters, tv_exact
from pbratio.sweep import BOUND_CHECKS

from conftest import FIXTURE, random_vectors

FIXTURE_RHO = 1.2086721375923708  # enumeration / Poisson mass, see test_ratio
# half L1 over x = 0..3 plus half the Poisson tail beyond 3, from enumeration
FIXTURE_TV = 0.06871301834358409


class TestSingleBernoulli:
    def test_upper_bound_attained(self):
        rep = bound_report(make_parameters([0.5]))
        assert rep.log_rho == 0.5
        assert rep.theorem2_upper == 0.5
        assert rep.theorem1_bound == 2.0
        assert rep.passed

    def test_tv(self):
        # Q puts 0.5 on {1} against pi(1) = 0.5 e^-0.5; that is the whole excess
        assert tv_exact(make_parameters([0.5])) == pytest.approx(0.5 - 0.5 * math.exp(-0.5), rel=1e-14)

    @pytest.mark.parametrize("p", [1e-9, 0.01, 0.3, 0.77, 0.999])
    def test_log_rho_equals_delta(self, p):
        rep = bound_report(make_parameters([p]))
        assert abs(rep.log_rho - p) <= 1e-14

    def test_conjecture_gap(self):
        assert conjecture_gap(make_parameters([0.5])) == pytest.approx(2 - math.exp(0.5), rel=1e-14)


class TestFixture:
    @pytest.fixture
    def rep(self):
        return bound_report(make_parameters(FIXTURE))

    def test_ratio_and_theorem2(self, rep):
        delta = 0.14 / 0.6
        assert rep.rho == pytest.approx(FIXTURE_RHO, rel=1e-13)
        assert rep.log_rho == pytest.approx(math.log(FIXTURE_RHO), rel=1e-13)
        assert rep.theorem2_lower == pytest.approx(delta * (1 - delta / 2 - 0.6 / 1.4), rel=1e-14)
        assert rep.theorem2_lower == pytest.approx(0.106111, abs=1e-6)
        assert rep.theorem2_lower <= rep.log_rho <= rep.theorem2_upper

    def test_tv_values(self, rep):
        assert rep.tv_exact == pytest.approx(FIXTURE_TV, rel=1e-12)
        assert rep.barbour_hall == pytest.approx((1 - math.exp(-0.6)) * 0.14 / 0.6, rel=1e-14)
        assert rep.remark1_primary == pytest.approx(0.6 * (1 - 1 / FIXTURE_RHO), rel=1e-12)
        assert rep.remark1_primary == pytest.approx(0.103587, abs=1e-6)

    def test_theorem1_margin(self, rep):
        assert rep.verdicts["max_ratio_pstar"].margin == pytest.approx(1 / 0.7 - FIXTURE_RHO, rel=1e-12)

    def test_conjecture_gap(self, rep):
        assert rep.conjecture_gap == pytest.approx(1 / (1 - 0.14 / 0.6) - FIXTURE_RHO, rel=1e-12)
        assert rep.conjecture_gap > 0

    def test_all_verdicts_pass(self, rep):
        assert rep.passed
        assert set(rep.verdicts) == set(BOUND_CHECKS)


def test_large_lambda_drops_optional_fields():
    rep = bound_report(make_parameters([0.6, 0.7, 0.2]))
    assert rep.theorem2_lower is None and rep.theorem2_upper is None
    assert rep.remark1_delta_chain is None
    assert "log_ratio_upper" not in rep.verdicts
    assert rep.passed


def test_lambda_exactly_one_included():
    rep = bound_report(make_parameters([0.5, 0.25, 0.25]))
    assert rep.theorem2_upper is not None
    assert rep.passed


def test_tiny_parameters_converge():
    pv = make_parameters([1e-8] * 10)
    assert tv_exact(pv) < 1e-6
    assert bound_report(pv).passed


def test_tv_against_enumeration():
    from pbratio import brute_pmf, poisson_pmf, poisson_tail

    for values in random_vectors(31, 100, n_range=(1, 12), p_max=0.95):
        pv = make_parameters(values)
        b = brute_pmf(pv).masses
        lam = pv.lam
        pi = [math.exp(-lam) * lam**x / math.factorial(x) for x in range(pv.n + 1)]
        head = math.fsum(abs(u - v) for u, v in zip(b, pi))
        tail = 1 - math.fsum(pi)
        assert tv_exact(pv) == pytest.approx(0.5 * head + 0.5 * tail, abs=1e-13)


def test_random_sweep_all_verdicts():
    for values in random_vectors(32, 1000, n_range=(1, 50), p_max=0.99):
        rep = bound_report(make_parameters(values))
        assert rep.passed, (values, {k: v for k, v in rep.verdicts.items() if not v.passed})


def test_small_lambda_asymptotics():
    for values in random_vectors(33, 100, n_range=(1, 20), p_max=0.99):
        pv = make_parameters(values)
        t = 1e-3
        scaled = make_parameters([t * v for v in values])
        assert scaled.delta == pytest.approx(t * pv.delta, rel=1e-12)
        rep = bound_report(scaled)
        assert abs(rep.log_rho / scaled.delta - 1) < 0.01


def test_equal_high_parameters_reports_gap_sign():
    rep = bound_report(make_parameters([0.9] * 10))
    # no ground truth: only sign and consistency are checked
    assert rep.conjecture_gap == pytest.approx(1 / (1 - 0.9) - rep.rho, rel=1e-12)
    assert math.isfinite(rep.conjecture_gap)
    assert rep.conjecture_gap > 0


def test_negative_gap_logged_not_raised(caplog, monkeypatch):
    from pbratio import ratio as ratio_mod

    pv = make_parameters([0.5])
    prof = ratio_mod.ratio_profile(pv)
    fake = ratio_mod.RatioProfile(**{**prof.__dict__, "rho": 10.0})
    with caplog.at_level(logging.ERROR):
        gap = conjecture_gap(pv, fake)
    assert gap < 0
    assert "counterexample" in caplog.text
