"""Brute-force references built on explicit subset enumeration.

Nothing here is fast, and nothing here reuses the convolution in
:mod:`pbratio.core`.  Subsets are index tuples using 0-based positions into
``pv.p``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .core import ParameterVector, PmfVector, _frozen, _log_or_neginf, make_parameters, pmf
from .errors import OracleDisagreement, TooLarge, UnsupportedPoint

MAX_BRUTE_N = 20
MAX_SUBSETS = 10**7
REPRESENTATION_RTOL = 1e-10


def _enumerate_outcomes(factors_zero: np.ndarray, factors_one: np.ndarray) -> np.ndarray:
    """Products over all 2^n binary vectors; bit i of the index selects ``factors_one[i]``."""
    out = np.ones(1)
    for f0, f1 in zip(factors_zero, factors_one):
        out = np.concatenate([out * f0, out * f1])
    return out


def _popcounts(n: int) -> np.ndarray:
    counts = np.zeros(1, dtype=np.int64)
    for _ in range(n):
        counts = np.concatenate([counts, counts + 1])
    return counts


def brute_pmf_routes(pv: ParameterVector) -> tuple[np.ndarray, np.ndarray]:
    """Masses computed two independent ways.

    Returns ``(direct, via_odds)`` where ``direct`` sums
    ``prod_{i in J} p_i prod_{k not in J} (1 - p_k)`` over all outcomes and
    ``via_odds`` is ``b(0) * sum_{#J = x} prod_{i in J} q_i``.
    """
    n = pv.n
    if n > MAX_BRUTE_N:
        raise TooLarge(f"brute force needs n <= {MAX_BRUTE_N}, got {n}")
    sizes = _popcounts(n)
    probs = _enumerate_outcomes(1.0 - pv.p, pv.p)
    weights = _enumerate_outcomes(np.ones(n), pv.q)
    b0 = math.prod(1.0 - float(v) for v in pv.p)
    direct = np.array([np.sum(probs[sizes == x]) for x in range(n + 1)])
    via_odds = np.array([b0 * np.sum(weights[sizes == x]) for x in range(n + 1)])
    return direct, via_odds


def brute_pmf(pv: ParameterVector, atol: float = 1e-12) -> PmfVector:
    """Masses ``b(0..n)`` by full enumeration, checked against the odds form.

    Raises
    ------
    TooLarge
        If ``n > 20``.
    OracleDisagreement
        If the two enumeration routes differ by more than ``atol`` anywhere.
    """
    direct, via_odds = brute_pmf_routes(pv)
    gap = float(np.max(np.abs(direct - via_odds)))
    if gap > atol:
        raise OracleDisagreement(f"enumeration routes disagree by {gap:.3e} for p={pv.as_list()}")
    return PmfVector(masses=_frozen(direct), log_masses=_frozen(_log_or_neginf(direct)), lam=pv.lam)


@dataclass(frozen=True)
class SubsetStatistics:
    """All subsets of a fixed size ``x`` with their weights and sums.

    ``weights[j]`` is ``W(J) = prod q_i`` for ``J = subsets[j]``; the other
    arrays are parallel to ``subsets``.
    """

    x: int
    subsets: tuple[tuple[int, ...], ...]
    weights: np.ndarray
    normalized_weights: np.ndarray
    s_J: np.ndarray
    S_J: np.ndarray
    s_Jc: np.ndarray
    S_Jc: np.ndarray

    @property
    def weight_map(self) -> dict[tuple[int, ...], float]:
        return {J: float(w) for J, w in zip(self.subsets, self.weights)}

    @property
    def total_weight(self) -> float:
        return math.fsum(self.weights)


def subset_statistics(pv: ParameterVector, x: int) -> SubsetStatistics:
    """Enumerate every ``J`` with ``#J = x`` in lexicographic order.

    Normalized weights use the convention ``0/0 := 0``.
    """
    n = pv.n
    if not 0 <= x <= n:
        raise UnsupportedPoint(f"subset size must be in [0, {n}], got {x}")
    if n > MAX_BRUTE_N or math.comb(n, x) > MAX_SUBSETS:
        raise TooLarge(f"C({n}, {x}) subsets exceed the enumeration limit")
    p = pv.p
    q = pv.q
    subsets = tuple(itertools.combinations(range(n), x))
    weights = np.array([math.prod(float(q[i]) for i in J) for J in subsets])
    s_J = np.array([math.fsum(p[i] for i in J) for J in subsets])
    S_J = np.array([math.fsum(q[i] for i in J) for J in subsets])
    in_J = np.zeros((len(subsets), n), dtype=bool)
    for j, J in enumerate(subsets):
        in_J[j, list(J)] = True
    # complements summed directly rather than as total - S(J), to keep the
    # identity S(J) + S(J^c) = S(N) a genuine check
    s_Jc = np.array([math.fsum(p[~row]) for row in in_J])
    S_Jc = np.array([math.fsum(q[~row]) for row in in_J])
    total = math.fsum(weights)
    normalized = weights / total if total > 0 else np.zeros_like(weights)
    return SubsetStatistics(
        x=x,
        subsets=subsets,
        weights=weights,
        normalized_weights=normalized,
        s_J=s_J,
        S_J=S_J,
        s_Jc=s_Jc,
        S_Jc=S_Jc,
    )


def _rel_close(a: float, b: float, rtol: float) -> bool:
    return abs(a - b) <= rtol * max(abs(a), abs(b))


@dataclass(frozen=True)
class RepresentationCheck:
    """One identity: a mass ratio from the PMF against its subset form."""

    name: str
    from_pmf: float
    from_subsets: float

    @property
    def rel_error(self) -> float:
        scale = max(abs(self.from_pmf), abs(self.from_subsets))
        return 0.0 if scale == 0 else abs(self.from_pmf - self.from_subsets) / scale


@dataclass(frozen=True)
class RepresentationReport:
    x: int
    checks: tuple[RepresentationCheck, ...]
    skipped: tuple[str, ...]
    rtol: float

    @property
    def max_rel_error(self) -> float:
        return max((c.rel_error for c in self.checks), default=0.0)

    @property
    def passed(self) -> bool:
        return all(_rel_close(c.from_pmf, c.from_subsets, self.rtol) for c in self.checks)


def verify_ratio_representations(
    pv: ParameterVector, x: int, rtol: float = REPRESENTATION_RTOL
) -> RepresentationReport:
    """Compare PMF mass ratios at ``x`` with their weighted-subset expressions.

    Checked identities:

    * ``ratio_1``: ``(x+1) b(x+1) / b(x) = sum_J Wbar(J) S(J^c)`` over ``#J = x``;
    * ``ratio_2a``: ``b(x) / ((x+1) b(x+1))`` equals
      ``sum_L Wbar(L) (x+1)^-1 sum_{k in L} 1 / (q_k + S(L^c))`` over ``#L = x+1``;
    * ``ratio_2b``: the same ratio equals
      ``sum_L Wbar(L) (x+1)^-1 sum_{k in L} (1 - p_k) / (p_k + s(L^c))``.

    When ``b(x+1) = 0`` the reciprocal ratio is undefined and only
    ``ratio_1`` is checked; the other two are listed in ``skipped``.
    """
    b = pmf(pv)
    if b[x] <= 0.0:
        raise UnsupportedPoint(f"b({x}) = 0; ratios at x are undefined")
    if pv.n > MAX_BRUTE_N:
        raise TooLarge(f"representation checks need n <= {MAX_BRUTE_N}, got {pv.n}")

    stats_x = subset_statistics(pv, x)
    forward = (x + 1) * b[x + 1] / b[x]
    checks = [
        RepresentationCheck(
            "ratio_1", forward, math.fsum(stats_x.normalized_weights * stats_x.S_Jc)
        )
    ]
    skipped: tuple[str, ...] = ()
    if b[x + 1] > 0.0:
        stats_l = subset_statistics(pv, x + 1)
        backward = b[x] / ((x + 1) * b[x + 1])
        terms_2a = []
        terms_2b = []
        for L, wbar, sLc, SLc in zip(
            stats_l.subsets, stats_l.normalized_weights, stats_l.s_Jc, stats_l.S_Jc
        ):
            if wbar == 0.0:
                # a member with p_k = 0; the inner sum may be 0/0 but carries no weight
                continue
            inner_a = math.fsum(1.0 / (pv.q[k] + SLc) for k in L) / (x + 1)
            inner_b = math.fsum((1.0 - pv.p[k]) / (pv.p[k] + sLc) for k in L) / (x + 1)
            terms_2a.append(wbar * inner_a)
            terms_2b.append(wbar * inner_b)
        checks.append(RepresentationCheck("ratio_2a", backward, math.fsum(terms_2a)))
        checks.append(RepresentationCheck("ratio_2b", backward, math.fsum(terms_2b)))
    else:
        skipped = ("ratio_2a", "ratio_2b")
    return RepresentationReport(x=x, checks=tuple(checks), skipped=skipped, rtol=rtol)


def weight_exchange_error(pv: ParameterVector, x: int) -> float:
    """Largest relative gap in ``W(J) p_k = W(J + {k}) (1 - p_k)`` over ``#J = x``, ``k`` not in ``J``."""
    stats = subset_statistics(pv, x)
    worst = 0.0
    for J, w in zip(stats.subsets, stats.weights):
        members = set(J)
        for k in range(pv.n):
            if k in members:
                continue
            lhs = float(w) * float(pv.p[k])
            rhs = math.prod(float(pv.q[i]) for i in sorted(members | {k})) * (1.0 - float(pv.p[k]))
            scale = max(abs(lhs), abs(rhs))
            if scale > 0:
                worst = max(worst, abs(lhs - rhs) / scale)
    return worst


def brute_log_ratio_on_ray(pv: ParameterVector, x: int, t: float) -> float:
    """``log r_{tp}(x)`` from its explicit elementary-symmetric form.

    ``t lam + sum_k log(1 - t p_k) + log(lam^-x x! sum_{#J = x} prod_{i in J} p_i / (1 - t p_i))``.
    """
    if pv.n > MAX_BRUTE_N or math.comb(pv.n, x) > MAX_SUBSETS:
        raise TooLarge("explicit ray form needs a small subset count")
    lam = pv.lam
    p = [float(v) for v in pv.p]
    inner = math.fsum(
        math.prod(p[i] / (1.0 - t * p[i]) for i in J)
        for J in itertools.combinations(range(pv.n), x)
    )
    if inner <= 0.0:
        raise UnsupportedPoint(f"b_tp({x}) = 0")
    return (
        t * lam
        + math.fsum(math.log1p(-t * v) for v in p)
        + math.log(inner)
        - x * math.log(lam)
        + math.lgamma(x + 1.0)
    )


def brute_check(values) -> dict:
    """Convenience: every oracle comparison for one parameter list."""
    pv = make_parameters(values)
    exact = brute_pmf(pv)
    fast = pmf(pv)
    reports = [verify_ratio_representations(pv, x) for x in range(pv.support_size + 1)]
    # the exchange identity is spot-checked; all sizes only while that stays cheap
    sizes = range(pv.n + 1) if pv.n <= 12 else (0, 1, 2, pv.n - 1)
    return {
        "pv": pv,
        "pmf_max_abs_error": float(np.max(np.abs(exact.masses - fast.masses))),
        "representations": reports,
        "weight_exchange_max_rel_error": max(
            weight_exchange_error(pv, x) for x in sizes
        ),
    }
