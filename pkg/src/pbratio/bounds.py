"""Bounds on the maximal density ratio and on total variation distance."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

from .core import DEFAULT_TOL, ParameterVector, PmfVector, pmf, poisson_pmf, poisson_tail
from .ratio import RatioProfile, Verdict, ratio_profile, strict_verdict, weak_verdict

log = logging.getLogger(__name__)


def tv_from_pmf(b: PmfVector, lam: float) -> float:
    """``d_TV(Q, Poiss_lam)`` from masses of ``Q`` stored on ``0..n``."""
    n = len(b) - 1
    pi = poisson_pmf(lam, n).masses
    head = math.fsum(abs(float(u) - float(v)) for u, v in zip(b.masses, pi))
    return 0.5 * head + 0.5 * poisson_tail(lam, n)


def tv_exact(pv: ParameterVector) -> float:
    """Exact total variation distance between ``Q_p`` and ``Poiss_lam``.

    ``Q_p`` lives on ``0..n``, so beyond ``n`` only the Poisson tail counts.
    """
    return tv_from_pmf(pmf(pv), pv.lam)


def conjecture_gap(pv: ParameterVector, profile: RatioProfile | None = None) -> float:
    """``1/(1 - Delta) - rho``; negative values would refute the open conjecture.

    A negative gap is logged at ERROR level but not raised.
    """
    if profile is None:
        profile = ratio_profile(pv)
    gap = 1.0 / (1.0 - pv.delta) - profile.rho
    if gap < 0:
        log.error("conjecture counterexample: 1/(1-Delta) - rho = %.6e for p=%r", gap, pv.as_list())
    return gap


@dataclass(frozen=True)
class BoundReport:
    """Exact quantities, every closed-form bound, and their verdicts.

    Fields that only apply for ``lam <= 1`` are ``None`` otherwise.
    """

    rho: float
    log_rho: float
    theorem1_bound: float
    theorem2_lower: float | None
    theorem2_upper: float | None
    tv_exact: float
    barbour_hall: float
    remark1_primary: float
    remark1_pstar: float
    remark1_delta_chain: tuple[float, float] | None
    conjecture_bound: float
    conjecture_gap: float
    b0: float
    verdicts: dict[str, Verdict] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts.values())


def bound_report(
    pv: ParameterVector, tol: float = DEFAULT_TOL, profile: RatioProfile | None = None
) -> BoundReport:
    """Evaluate every bound for ``pv`` and record signed margins.

    Verdict names and the inequality each encodes (margin = right - left):

    - ``max_ratio_pstar``: ``rho <= 1/(1 - p*)``
    - ``log_ratio_lower`` / ``log_ratio_upper`` (``lam <= 1``):
      ``Delta (1 - Delta/2 - lam/(2(1-p*))) <= log rho <= Delta``
    - ``ratio_exp_delta`` (``lam <= 1``): ``rho <= e^Delta``
    - ``exp_delta_below_conjecture`` (``lam <= 1``): ``e^Delta < 1/(1 - Delta)``
    - ``tv_barbour_hall``: ``tv <= (1 - e^-lam) Delta``
    - ``tv_ratio``: ``tv <= min(1, lam)(1 - 1/rho)``
    - ``tv_ratio_pstar``: ``min(1, lam)(1 - 1/rho) <= min(1, lam) p*``
    - ``tv_ratio_delta`` / ``tv_delta_square`` (``lam <= 1``):
      ``lam(1 - 1/rho) <= lam(1 - e^-Delta) <= lam Delta``
    - ``b0_lower`` / ``b0_upper``: ``1 - lam <= b(0) < e^-lam``
    """
    if profile is None:
        profile = ratio_profile(pv, tol=tol)
    lam, delta, p_star = pv.lam, pv.delta, pv.p_star
    rho, log_rho = profile.rho, profile.log_rho
    small = lam <= 1.0
    m = min(1.0, lam)
    b0 = profile.pmf[0]

    theorem1 = 1.0 / (1.0 - p_star)
    lower = delta * (1.0 - delta / 2.0 - lam / (2.0 * (1.0 - p_star))) if small else None
    upper = delta if small else None
    tv = tv_from_pmf(profile.pmf, lam)
    bh = -math.expm1(-lam) * delta
    primary = m * -math.expm1(-log_rho)
    pstar_bound = m * p_star
    chain = (-lam * math.expm1(-delta), lam * delta) if small else None
    conj = 1.0 / (1.0 - delta)

    # scale-aware slack for the non-strict inequalities
    def tol_at(*xs: float) -> float:
        return tol * max(1.0, *(abs(x) for x in xs))

    v: dict[str, Verdict] = {}
    v["max_ratio_pstar"] = weak_verdict(theorem1 - rho, tol_at(theorem1))
    if small:
        v["log_ratio_lower"] = weak_verdict(log_rho - lower, tol_at(log_rho))
        v["log_ratio_upper"] = weak_verdict(upper - log_rho, tol_at(log_rho))
        v["ratio_exp_delta"] = weak_verdict(math.exp(delta) - rho, tol_at(rho))
        # 1/(1-D) - e^D rewritten to survive D below 1e-8
        gap = math.exp(delta) * math.expm1(-delta - math.log1p(-delta))
        v["exp_delta_below_conjecture"] = strict_verdict(gap)
    v["tv_barbour_hall"] = weak_verdict(bh - tv, tol)
    v["tv_ratio"] = weak_verdict(primary - tv, tol)
    v["tv_ratio_pstar"] = weak_verdict(pstar_bound - primary, tol)
    if small:
        v["tv_ratio_delta"] = weak_verdict(chain[0] - primary, tol)
        v["tv_delta_square"] = weak_verdict(chain[1] - chain[0], tol)
    v["b0_lower"] = weak_verdict(b0 - (1.0 - lam), tol)
    # e^-lam - b(0) = b(0) (exp(sum(-p - log(1-p))) - 1), exact in sign for tiny p
    excess = math.fsum(-float(p) - math.log1p(-float(p)) for p in pv.p)
    v["b0_upper"] = strict_verdict(b0 * math.expm1(excess))

    return BoundReport(
        rho=rho,
        log_rho=log_rho,
        theorem1_bound=theorem1,
        theorem2_lower=lower,
        theorem2_upper=upper,
        tv_exact=tv,
        barbour_hall=bh,
        remark1_primary=primary,
        remark1_pstar=pstar_bound,
        remark1_delta_chain=chain,
        conjecture_bound=conj,
        conjecture_gap=conjecture_gap(pv, profile),
        b0=b0,
        verdicts=v,
    )
