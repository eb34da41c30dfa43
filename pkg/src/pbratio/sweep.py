"""Seeded randomized certification sweeps.

Trial ``i`` draws from its own generator seeded with ``(seed, i)``, so
results do not depend on worker count or scheduling.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bounds import bound_report
from .core import DEFAULT_TOL, make_parameters, pmf
from .oracle import brute_pmf
from .ratio import certify_structure, ratio_profile, score_consistency_error

BOUND_CHECKS = (
    "max_ratio_pstar",
    "log_ratio_lower",
    "log_ratio_upper",
    "ratio_exp_delta",
    "exp_delta_below_conjecture",
    "tv_barbour_hall",
    "tv_ratio",
    "tv_ratio_pstar",
    "tv_ratio_delta",
    "tv_delta_square",
    "b0_lower",
    "b0_upper",
)
STRUCTURE_CHECKS = (
    "argmax_window",
    "argmax_bracket",
    "strict_decrease",
    "forward_lower",
    "backward_above_mean",
)
EXTRA_CHECKS = ("oracle", "score_consistency", "normalization")
ALL_CHECKS = BOUND_CHECKS + STRUCTURE_CHECKS + EXTRA_CHECKS
CONJECTURE = "conjecture"

ORACLE_MAX_N = 12


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SweepConfig:
    """Sampling and check selection for one sweep.

    ``n`` is uniform on ``n_range``.  Without a cap, each ``p_i`` is uniform on
    ``[0, p_max]``.  With ``lambda_cap``, each ``p_i`` is uniform on
    ``[0, min(p_max, 2 * lambda_cap / n)]`` and draws with ``lam > lambda_cap``
    are rejected; the narrower range keeps acceptance near one half for
    every ``n``.
    """

    seed: int
    trials: int
    n_range: tuple[int, int]
    p_max: float
    lambda_cap: float | None = None
    checks: tuple[str, ...] = ALL_CHECKS + (CONJECTURE,)
    tol: float = DEFAULT_TOL

    def __post_init__(self) -> None:
        if not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if self.trials <= 0:
            raise ConfigError(f"trials must be > 0, got {self.trials}")
        lo, hi = self.n_range
        if not 1 <= lo <= hi:
            raise ConfigError(f"invalid n range {lo}:{hi}")
        if not 0.0 < self.p_max < 1.0:
            raise ConfigError(f"p_max must lie in (0, 1), got {self.p_max}")
        if self.lambda_cap is not None and not self.lambda_cap > 0:
            raise ConfigError(f"lambda cap must be > 0, got {self.lambda_cap}")
        unknown = set(self.checks) - set(ALL_CHECKS) - {CONJECTURE}
        if unknown:
            raise ConfigError(f"unknown checks: {', '.join(sorted(unknown))}")


def parse_checks(spec: str) -> tuple[str, ...]:
    """``"all"`` or a comma list of check names (``bounds``/``structure`` expand)."""
    out: list[str] = []
    for name in (s.strip() for s in spec.split(",")):
        if not name:
            continue
        if name == "all":
            out.extend(ALL_CHECKS + (CONJECTURE,))
        elif name == "bounds":
            out.extend(BOUND_CHECKS)
        elif name == "structure":
            out.extend(STRUCTURE_CHECKS)
        else:
            out.append(name)
    return tuple(dict.fromkeys(out))


def sample_parameters(config: SweepConfig, index: int) -> list[float]:
    rng = np.random.default_rng([config.seed, index])
    lo, hi = config.n_range
    n = int(rng.integers(lo, hi + 1))
    top = config.p_max
    if config.lambda_cap is not None:
        top = min(top, 2.0 * config.lambda_cap / n)
    while True:
        p = rng.uniform(0.0, top, size=n)
        lam = p.sum()
        if lam > 0 and (config.lambda_cap is None or lam <= config.lambda_cap):
            return [float(v) for v in p]


@dataclass(frozen=True)
class TrialResult:
    index: int
    p: tuple[float, ...]
    # check name -> (passed or None for not applicable, margin)
    outcomes: dict[str, tuple[bool | None, float | None]]
    conjecture_gap: float | None


def run_trial(p: list[float], checks: tuple[str, ...], tol: float = DEFAULT_TOL, index: int = 0) -> TrialResult:
    """Evaluate ``checks`` on one parameter vector."""
    pv = make_parameters(p)
    wanted = set(checks)
    outcomes: dict[str, tuple[bool | None, float | None]] = {}
    profile = ratio_profile(pv, tol=tol)

    if wanted & set(BOUND_CHECKS):
        verdicts = bound_report(pv, tol=tol, profile=profile).verdicts
        for name in BOUND_CHECKS:
            if name in wanted:
                v = verdicts.get(name)
                outcomes[name] = (None, None) if v is None else (v.passed, v.margin)
    if wanted & set(STRUCTURE_CHECKS):
        verdicts = certify_structure(pv, tol=tol, profile=profile).verdicts
        for name in STRUCTURE_CHECKS:
            if name in wanted:
                v = verdicts[name]
                outcomes[name] = (v.passed if v.margin is not None else None, v.margin)
    if "oracle" in wanted:
        if pv.n <= ORACLE_MAX_N:
            err = float(np.max(np.abs(brute_pmf(pv).masses - profile.pmf.masses)))
            outcomes["oracle"] = (err <= tol, tol - err)
        else:
            outcomes["oracle"] = (None, None)
    if "score_consistency" in wanted:
        err = score_consistency_error(profile)
        outcomes["score_consistency"] = (err <= tol, tol - err)
    if "normalization" in wanted:
        err = abs(profile.pmf.total - 1.0)
        outcomes["normalization"] = (err <= tol, tol - err)

    gap = None
    if CONJECTURE in wanted:
        gap = 1.0 / (1.0 - pv.delta) - profile.rho
    return TrialResult(index, tuple(p), outcomes, gap)


def _run_chunk(config: SweepConfig, indices: range) -> list[TrialResult]:
    return [
        run_trial(sample_parameters(config, i), config.checks, config.tol, index=i) for i in indices
    ]


@dataclass
class CheckTally:
    passed: int = 0
    failed: int = 0
    skipped: int = 0
    min_margin: float | None = None
    first_failure: int | None = None


@dataclass
class SweepSummary:
    config: SweepConfig
    tallies: dict[str, CheckTally]
    first_failure: TrialResult | None = None
    first_failure_check: str | None = None
    conjecture_min_gap: float | None = None
    conjecture_argmin: TrialResult | None = None
    conjecture_counterexamples: int = 0
    results: list[TrialResult] = field(default_factory=list, repr=False)

    @property
    def passed(self) -> bool:
        return all(t.failed == 0 for t in self.tallies.values())


def summarize(config: SweepConfig, results: list[TrialResult], keep_results: bool = False) -> SweepSummary:
    asserted = [c for c in config.checks if c != CONJECTURE]
    tallies = {c: CheckTally() for c in asserted}
    summary = SweepSummary(config=config, tallies=tallies)
    for res in sorted(results, key=lambda r: r.index):
        for name in asserted:
            ok, margin = res.outcomes[name]
            tally = tallies[name]
            if ok is None:
                tally.skipped += 1
                continue
            if ok:
                tally.passed += 1
            else:
                tally.failed += 1
                if tally.first_failure is None:
                    tally.first_failure = res.index
                if summary.first_failure is None:
                    summary.first_failure = res
                    summary.first_failure_check = name
            if margin is not None and (tally.min_margin is None or margin < tally.min_margin):
                tally.min_margin = margin
        if res.conjecture_gap is not None:
            if res.conjecture_gap < 0:
                summary.conjecture_counterexamples += 1
            if summary.conjecture_min_gap is None or res.conjecture_gap < summary.conjecture_min_gap:
                summary.conjecture_min_gap = res.conjecture_gap
                summary.conjecture_argmin = res
    if keep_results:
        summary.results = sorted(results, key=lambda r: r.index)
    return summary


def run_sweep(config: SweepConfig, workers: int = 1, keep_results: bool = False) -> SweepSummary:
    """Run every trial of ``config`` and tally the outcomes.

    With ``workers > 1`` trials are split into contiguous chunks across
    processes; the merged result is identical to a serial run.
    """
    if workers <= 1:
        results = _run_chunk(config, range(config.trials))
    else:
        size = math.ceil(config.trials / workers)
        chunks = [range(i, min(i + size, config.trials)) for i in range(0, config.trials, size)]
        results = []
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(_run_chunk, [config] * len(chunks), chunks):
                results.extend(part)
    return summarize(config, results, keep_results=keep_results)
