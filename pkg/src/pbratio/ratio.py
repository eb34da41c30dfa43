"""Density ratio ``r(x) = b(x) / pi_lam(x)`` and its structural certificates."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import DEFAULT_TOL, ParameterVector, PmfVector, _frozen, pmf


@dataclass(frozen=True)
class Verdict:
    """Outcome of one inequality check.

    ``margin`` is oriented so that positive means the inequality holds with
    room to spare.  ``None`` means the check found nothing to test.
    """

    passed: bool
    margin: float | None
    detail: str = ""

    def as_dict(self) -> dict:
        return {"passed": self.passed, "margin": self.margin, "detail": self.detail}


def weak_verdict(margin: float, tol: float = DEFAULT_TOL, detail: str = "") -> Verdict:
    """Non-strict inequality: holds if ``margin >= -tol``."""
    return Verdict(bool(margin >= -tol), float(margin), detail)


def strict_verdict(margin: float, detail: str = "") -> Verdict:
    """Strict inequality: holds only if ``margin > 0`` in floating point."""
    return Verdict(bool(margin > 0.0), float(margin), detail)


@dataclass(frozen=True)
class RatioProfile:
    """Log density ratios over ``0..n`` plus their maximum.

    ``scores[x] = r(x+1) / r(x)`` for ``x`` in ``0..support_size-1``; the list
    stops at the support boundary instead of being padded.
    """

    log_r: np.ndarray
    r: np.ndarray
    rho: float
    log_rho: float
    argmax_set: tuple[int, ...]
    scores: np.ndarray
    lam: float
    pmf: PmfVector

    @property
    def window(self) -> tuple[int, int]:
        return 1, math.ceil(self.lam)

    def window_log_rho(self) -> float:
        """Maximum of ``log r`` restricted to ``1..ceil(lam)``."""
        lo, hi = self.window
        return float(np.max(self.log_r[lo : hi + 1]))


def log_ratio(b: PmfVector, lam: float) -> np.ndarray:
    """``log b(x) - log pi_lam(x)`` for every stored ``x``.

    ``log b(x) - x log lam`` is formed first: for ``x = 1`` and a single
    parameter this cancels exactly and leaves ``log r(1) = lam``.
    """
    xs = np.arange(len(b))
    lgam = np.array([math.lgamma(x + 1.0) for x in xs])
    with np.errstate(invalid="ignore"):
        out = (b.log_masses - xs * math.log(lam)) + lam + lgam
    out[~np.isfinite(b.log_masses)] = -np.inf
    return out


def forward_ratios(b: PmfVector) -> np.ndarray:
    """``(x+1) b(x+1) / b(x)`` for every ``x`` with ``b(x) > 0``.

    The last entry (at the support end) is 0 because ``b(x+1) = 0`` there.
    """
    m = b.masses
    s = int(np.count_nonzero(m > 0)) - 1
    xs = np.arange(s + 1)
    nxt = np.append(m[1 : s + 1], 0.0)
    return (xs + 1) * nxt / m[: s + 1]


def ratio_profile(pv: ParameterVector, tol: float = DEFAULT_TOL) -> RatioProfile:
    """Full-scan density-ratio profile of ``pv``.

    The maximum is taken over every ``x`` in ``0..n``, never over the window
    ``1..ceil(lam)`` alone; the window is a property to verify.  Ties (within
    ``tol`` in log scale) are all reported in ``argmax_set``.
    """
    b = pmf(pv)
    log_r = log_ratio(b, pv.lam)
    log_rho = float(np.max(log_r))
    argmax = tuple(int(x) for x in np.flatnonzero(log_r >= log_rho - tol))
    scores = forward_ratios(b)[:-1] / pv.lam
    return RatioProfile(
        log_r=_frozen(log_r),
        r=_frozen(np.exp(log_r)),
        rho=math.exp(log_rho),
        log_rho=log_rho,
        argmax_set=argmax,
        scores=_frozen(scores),
        lam=pv.lam,
        pmf=b,
    )


def score_consistency_error(profile: RatioProfile) -> float:
    """Largest relative gap between the two ways of computing ``r(x+1)/r(x)``."""
    k = len(profile.scores)
    if k == 0:
        return 0.0
    via_logs = np.exp(np.diff(profile.log_r[: k + 1]))
    return float(np.max(np.abs(via_logs - profile.scores) / np.abs(profile.scores)))


@dataclass(frozen=True)
class StructureReport:
    """Verdicts on the argmax location and the monotone mass ratios."""

    verdicts: dict[str, Verdict]

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts.values())


def certify_structure(
    pv: ParameterVector, tol: float = DEFAULT_TOL, profile: RatioProfile | None = None
) -> StructureReport:
    """Check the structural inequalities that bracket the maximizer of ``r``.

    Verdicts, with margins oriented positive-is-good:

    ``argmax_window``
        every maximizer lies in ``[1, ceil(lam)]``.
    ``argmax_bracket``
        ``(x+1)b(x+1)/b(x) <= lam <= x b(x)/b(x-1)`` at every maximizer,
        with ``b(-1) := 0``.
    ``strict_decrease``
        ``(x+1)b(x+1)/b(x)`` strictly decreasing on ``{b(x) > 0}``; margin is
        the smallest relative step.
    ``forward_lower``
        wherever ``x b(x)/b(x-1) >= lam``, also
        ``(x+1)b(x+1)/b(x) >= lam - p*/(1-p*)``.
    ``backward_above_mean``
        ``b(x)/((x+1)b(x+1)) > 1/lam`` for each integer ``x >= lam`` with
        ``b(x+1) > 0`` (strict).
    """
    if profile is None:
        profile = ratio_profile(pv, tol=tol)
    lam = pv.lam
    c = forward_ratios(profile.pmf)  # c[x] = (x+1)b(x+1)/b(x) on the support
    s = len(c) - 1

    def backward(x: int) -> float:
        # x b(x)/b(x-1), infinite at x = 0 by the b(-1) := 0 convention
        return math.inf if x == 0 else x * profile.pmf[x] / profile.pmf[x - 1]

    verdicts: dict[str, Verdict] = {}

    lo, hi = profile.window
    worst = min(min(x - lo, hi - x) for x in profile.argmax_set)
    verdicts["argmax_window"] = Verdict(
        worst >= 0, float(worst), f"argmax={list(profile.argmax_set)} window=[{lo},{hi}]"
    )

    bracket = min(min(lam - c[x], backward(x) - lam) for x in profile.argmax_set)
    verdicts["argmax_bracket"] = weak_verdict(bracket, tol * max(1.0, lam))

    if s >= 1:
        steps = (c[:-1] - c[1:]) / c[:-1]
        verdicts["strict_decrease"] = strict_verdict(float(np.min(steps)))
    else:
        verdicts["strict_decrease"] = Verdict(True, None, "single-point support")

    floor = lam - pv.p_star / (1.0 - pv.p_star)
    margins = [c[x] - floor for x in range(s + 1) if backward(x) >= lam]
    verdicts["forward_lower"] = weak_verdict(min(margins), tol * max(1.0, lam))

    # x ranges over integers >= lam that still have b(x+1) > 0
    above = [x for x in range(math.ceil(lam), s)]
    if above:
        m = min(1.0 / c[x] - 1.0 / lam for x in above)
        verdicts["backward_above_mean"] = strict_verdict(m * lam)
    else:
        verdicts["backward_above_mean"] = Verdict(True, None, "no x >= lam with b(x+1) > 0")

    return StructureReport(verdicts)
