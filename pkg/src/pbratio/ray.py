"""Log density ratios along the ray ``t -> t p`` for ``t`` in (0, 1].

``L_x(t) = log r_{tp}(x)`` compares ``Q_{tp}`` with ``Poiss_{t lam}``.  Each
``L_x`` is concave in ``t``, and the envelope ``f(t) = max_x L_x(t)`` is the
log maximal ratio of the scaled law.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .core import DEFAULT_TOL, ParameterVector, PmfVector, _frozen, make_parameters, pmf
from .errors import ConsistencyError, EmptyGrid, ScaleOutOfRange, UnsupportedPoint
from .ratio import log_ratio

DERIVATIVE_RTOL = 1e-10


def default_grid() -> np.ndarray:
    """101 uniform points on [1e-4, 1]."""
    return np.linspace(1e-4, 1.0, 101)


def _check_t(t: float) -> None:
    if not (0.0 < t <= 1.0):
        raise ScaleOutOfRange(f"t must lie in (0, 1], got {t!r}")


@dataclass(frozen=True)
class _RayPoint:
    b: PmfVector
    log_r: np.ndarray


@lru_cache(maxsize=4096)
def _ray_point_cached(p: tuple[float, ...], t: float) -> _RayPoint:
    scaled = make_parameters(np.array(p) * t)
    b = pmf(scaled)
    return _RayPoint(b, log_ratio(b, scaled.lam))


def _ray_point(pv: ParameterVector, t: float) -> _RayPoint:
    _check_t(t)
    return _ray_point_cached(tuple(float(v) for v in pv.p), float(t))


def _supported(pt: _RayPoint, x: int) -> None:
    if x < 0 or pt.b[x] <= 0.0:
        raise UnsupportedPoint(f"b_tp({x}) = 0")


def eval_L(pv: ParameterVector, x: int, t: float) -> float:
    """``log r_{tp}(x)`` through the exact PMF of the scaled parameters.

    Meaningful for ``1 <= x <= ceil(lam)``, but any ``x`` with ``b_tp(x) > 0``
    is accepted.
    """
    pt = _ray_point(pv, t)
    _supported(pt, x)
    return float(pt.log_r[x])


def derivative_forms(pv: ParameterVector, x: int, t: float) -> tuple[float, float]:
    """Two closed forms of ``L_x'(t)``.

    ``lam - (x+1) b_tp(x+1) / (t b_tp(x))`` and
    ``lam (1 - exp(L_{x+1}(t) - L_x(t)))``.
    """
    pt = _ray_point(pv, t)
    _supported(pt, x)
    lam = pv.lam
    from_masses = lam - (x + 1) * pt.b[x + 1] / (t * pt.b[x])
    nxt = pt.log_r[x + 1] if x + 1 < len(pt.log_r) else -math.inf
    from_logs = -lam * math.expm1(nxt - pt.log_r[x])
    return float(from_masses), float(from_logs)


def eval_L_prime(pv: ParameterVector, x: int, t: float, rtol: float = DERIVATIVE_RTOL) -> float:
    """``L_x'(t)``, after checking that both closed forms agree.

    Agreement is relative to ``max(1, |value|)``: near a maximizer the
    derivative cancels to zero while both forms are of size ``lam``.

    Raises
    ------
    ConsistencyError
        If the two forms differ by more than ``rtol``.
    """
    a, b = derivative_forms(pv, x, t)
    if abs(a - b) > rtol * max(1.0, abs(a), abs(b)):
        raise ConsistencyError(f"L'_{x}({t}) forms disagree: {a!r} vs {b!r}")
    return a


@dataclass(frozen=True)
class RayProfile:
    """``L_x(t)`` and ``L_x'(t)`` on a grid, for ``x = 1..ceil(lam)``.

    ``L[i, j]`` is ``L_{xs[j]}(t_grid[i])``.  ``f_full`` is the maximum over
    the whole support; ``f`` only looks at the window ``xs``.
    """

    t_grid: np.ndarray
    xs: tuple[int, ...]
    L: np.ndarray
    L_prime: np.ndarray
    f: np.ndarray
    f_full: np.ndarray
    envelope_argmax: tuple[tuple[int, ...], ...]

    @property
    def nondecreasing(self) -> bool:
        return bool(np.all(np.diff(self.f) >= -DEFAULT_TOL))

    def second_differences(self) -> np.ndarray:
        """``L(t_{i-1}) - 2 L(t_i) + L(t_{i+1})`` per column (uniform grids only)."""
        return self.L[:-2] - 2.0 * self.L[1:-1] + self.L[2:]


def envelope(
    pv: ParameterVector, t_grid: Sequence[float] | np.ndarray | None = None, tol: float = DEFAULT_TOL
) -> RayProfile:
    """Evaluate every ``L_x`` and the envelope over ``t_grid``.

    Raises
    ------
    EmptyGrid
        If the grid is empty or not strictly increasing.
    ScaleOutOfRange
        If a grid point falls outside (0, 1].
    """
    grid = default_grid() if t_grid is None else np.asarray(t_grid, dtype=float).ravel()
    if grid.size == 0:
        raise EmptyGrid("t grid is empty")
    if np.any(np.diff(grid) <= 0):
        raise EmptyGrid("t grid must be strictly increasing")
    for t in (grid[0], grid[-1]):
        _check_t(float(t))

    xs = tuple(range(1, pv.ceil_lam + 1))
    L = np.empty((grid.size, len(xs)))
    Lp = np.empty_like(L)
    f_full = np.empty(grid.size)
    argmax = []
    for i, t in enumerate(grid):
        pt = _ray_point(pv, float(t))
        # ceil(lam) never exceeds the number of positive p_i, so all xs are supported
        L[i] = pt.log_r[1 : len(xs) + 1]
        Lp[i] = [eval_L_prime(pv, x, float(t)) for x in xs]
        f_full[i] = np.max(pt.log_r)
        top = L[i].max()
        argmax.append(tuple(x for x, v in zip(xs, L[i]) if v >= top - tol))
    return RayProfile(
        t_grid=_frozen(grid),
        xs=xs,
        L=L,
        L_prime=Lp,
        f=_frozen(L.max(axis=1)),
        f_full=_frozen(f_full),
        envelope_argmax=tuple(argmax),
    )
