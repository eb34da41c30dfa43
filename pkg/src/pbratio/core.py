"""Parameter validation, moments and exact mass functions.

A Poisson binomial law is the distribution of ``X = Z_1 + ... + Z_n`` with
independent ``Z_i ~ Bernoulli(p_i)``.  Only finite parameter vectors are
handled; an infinite sequence with summable ``p_i`` must be truncated by the
caller, which costs at most ``sum(p_i for i > n)`` in total variation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DegenerateLambda, InvalidLambda, ValueOutOfRange

#: Default comparison tolerance used across the package.
DEFAULT_TOL = 1e-12

# Relative increment at which Poisson tail summation stops.
_TAIL_REL_EPS = 1e-18


def _frozen(values: Iterable[float]) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ParameterVector:
    """Validated Bernoulli parameters with their moments cached.

    Build instances with :func:`make_parameters`; the constructor does not
    validate.
    """

    p: np.ndarray
    lam: float
    delta: float
    p_star: float
    variance: float
    q: np.ndarray
    support_size: int

    @property
    def n(self) -> int:
        return len(self.p)

    @property
    def ceil_lam(self) -> int:
        return math.ceil(self.lam)

    def scaled(self, t: float) -> "ParameterVector":
        """Parameters ``t * p`` (used for the ray analysis)."""
        return make_parameters(t * self.p)

    def as_list(self) -> list[float]:
        return [float(v) for v in self.p]


@dataclass(frozen=True)
class PmfVector:
    """Probability masses on ``0..len(masses)-1`` with their logarithms."""

    masses: np.ndarray
    log_masses: np.ndarray
    lam: float

    def __len__(self) -> int:
        return len(self.masses)

    def __getitem__(self, x: int) -> float:
        """Mass at ``x``; zero outside the stored range (including ``x < 0``)."""
        if x < 0 or x >= len(self.masses):
            return 0.0
        return float(self.masses[x])

    @property
    def total(self) -> float:
        return math.fsum(self.masses)


def make_parameters(values: Sequence[float] | np.ndarray) -> ParameterVector:
    """Validate ``values`` and compute ``lambda``, ``Delta``, ``p*``, Var and odds.

    Input order is kept.  Zero entries are kept too; they only add a factor
    one to the convolution.

    Raises
    ------
    ValueOutOfRange
        If the list is empty, or an entry is not a finite number in [0, 1).
    DegenerateLambda
        If every entry is zero.
    """
    p = np.array(values, dtype=float).ravel()
    if p.size == 0:
        raise ValueOutOfRange("parameter list is empty")
    bad = ~np.isfinite(p) | (p < 0.0) | (p >= 1.0)
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise ValueOutOfRange(f"p[{i}] = {float(p[i])!r} is outside [0, 1)")

    lam = math.fsum(p)
    if lam <= 0.0:
        raise DegenerateLambda("all parameters are zero (lambda = 0)")

    delta = math.fsum(p * p) / lam
    variance = math.fsum(p * (1.0 - p))
    return ParameterVector(
        p=_frozen(p),
        lam=lam,
        delta=delta,
        p_star=float(p.max()),
        variance=variance,
        q=_frozen(p / (1.0 - p)),
        support_size=int(np.count_nonzero(p)),
    )


def odds(pv: ParameterVector) -> np.ndarray:
    """Odds ``p_i / (1 - p_i)``, elementwise."""
    return pv.q


def _log_or_neginf(masses: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(masses)


def pmf(pv: ParameterVector) -> PmfVector:
    """Exact masses ``b(0..n)`` by sequential Bernoulli convolution.

    Each step is ``new[x] = old[x] * (1 - p_i) + old[x - 1] * p_i``.  All terms
    are non-negative, so every mass carries a small *relative* error, including
    the tiny ones in the tails.
    """
    n = pv.n
    b = np.zeros(n + 1)
    b[0] = 1.0
    for k, pk in enumerate(pv.p, start=1):
        if pk == 0.0:
            continue
        # b[1:k+1] uses old values of b[0:k]; numpy evaluates the RHS first.
        b[1 : k + 1] = b[1 : k + 1] * (1.0 - pk) + b[0:k] * pk
        b[0] *= 1.0 - pk
    return PmfVector(masses=_frozen(b), log_masses=_frozen(_log_or_neginf(b)), lam=pv.lam)


def _check_lambda(lam: float) -> None:
    if not (math.isfinite(lam) and lam > 0.0):
        raise InvalidLambda(f"Poisson mean must be finite and > 0, got {lam!r}")


def poisson_log_pmf(lam: float, x: np.ndarray | int) -> np.ndarray:
    """``log pi_lam(x) = -lam + x log lam - log Gamma(x + 1)``."""
    _check_lambda(lam)
    xs = np.asarray(x, dtype=float)
    lgam = np.vectorize(math.lgamma, otypes=[float])(xs + 1.0)
    return -lam + xs * math.log(lam) - lgam


def poisson_pmf(lam: float, x_max: int) -> PmfVector:
    """Poisson masses on ``0..x_max``, evaluated in log space.

    The result is a truncation; its masses sum to less than one.
    """
    _check_lambda(lam)
    if x_max < 0:
        raise ValueError(f"x_max must be >= 0, got {x_max}")
    logs = poisson_log_pmf(lam, np.arange(x_max + 1))
    return PmfVector(masses=_frozen(np.exp(logs)), log_masses=_frozen(logs), lam=lam)


def poisson_tail(lam: float, x: int) -> float:
    """``P(Poisson(lam) > x)`` by summing masses ``x+1, x+2, ...``.

    Summation stops past the mode once a term falls below 1e-18 of the
    running sum; no incomplete-gamma function is needed.
    """
    _check_lambda(lam)
    log_lam = math.log(lam)
    k = max(x + 1, 0)
    total = 0.0
    terms = []
    while True:
        term = math.exp(-lam + k * log_lam - math.lgamma(k + 1.0))
        terms.append(term)
        total += term
        if k > lam and term <= _TAIL_REL_EPS * total:
            break
        if k > lam and total == 0.0:
            break
        k += 1
    return math.fsum(terms)
