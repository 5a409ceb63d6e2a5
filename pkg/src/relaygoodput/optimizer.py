"""Rate and relay-placement search for maximum goodput.

Every search is a uniform grid scan followed by golden-section refinement
around the best grid point. The grid guards against the local maxima of a
goodput surface that is not concave; the refinement is only trusted if it
beats the grid.
"""

import math
from dataclasses import dataclass, field
from typing import List, NamedTuple, Tuple

import numpy as np

from .analytic import Mode, goodput
from .channel import ChannelParams
from .special import DomainError

__all__ = [
    "K_MARGIN",
    "golden_section_max",
    "k_grid",
    "rate_grid",
    "optimize_k",
    "optimize_rate",
    "optimize_joint",
    "OptResult",
    "KOpt",
    "RateOpt",
]

K_MARGIN = 1e-3
K_POINTS = 199
RATE_POINTS = 400
RATE_RANGE = (0.05, 20.0)
TOL = 1e-6

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


class KOpt(NamedTuple):
    k: float
    goodput: float


class RateOpt(NamedTuple):
    rate: float
    goodput: float
    interior: bool


@dataclass
class OptResult:
    mode: Mode
    best_rate: float
    best_k: float
    best_goodput: float
    sweeps: int = 0
    interior: bool = True
    search_trace: List[Tuple[float, float, float]] = field(default_factory=list, repr=False)


def golden_section_max(f, a, b, tol=TOL):
    """Maximize a unimodal ``f`` on ``[a, b]`` until the bracket is ``<= tol`` wide.

    Returns ``(x, f(x))`` for the best point evaluated. Ties keep the left
    part of the bracket, so flat plateaus resolve towards smaller ``x``.
    """
    if not a <= b:
        raise DomainError(f"empty bracket [{a!r}, {b!r}]")
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


def k_grid(n=K_POINTS, margin=K_MARGIN):
    """Relay locations symmetric about 0.5 (mirror pairs are exact)."""
    half = np.linspace(margin, 0.5, (n + 1) // 2)
    if n % 2:
        return np.concatenate([half, 1.0 - half[-2::-1]])
    return np.concatenate([half[:-1], 1.0 - half[-2::-1]])


def rate_grid(r_min=RATE_RANGE[0], r_max=RATE_RANGE[1], n=RATE_POINTS):
    return np.geomspace(r_min, r_max, n)


def _grid_then_refine(f, grid, tol):
    values = np.array([f(x) for x in grid])
    i = int(np.argmax(values))  # first maximum: ties go to the smaller argument
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
    x, fx = golden_section_max(f, float(lo), float(hi), tol)
    interior = 0 < i < len(grid) - 1
    if fx > values[i]:
        return x, fx, interior
    return float(grid[i]), float(values[i]), interior


def _relay_mode(mode):
    mode = Mode(mode)
    if mode is Mode.SINGLE:
        raise DomainError("relay placement is meaningless without a relay; use af or df")
    return mode


def optimize_k(mode, gamma, alpha, rate, tol=TOL, trace=None):
    """Relay location maximizing goodput at a fixed rate.

    For AF the optimum is the midpoint 0.5 for every rate and SNR.

    Returns
    -------
    KOpt
        ``(k, goodput)``.
    """
    mode = _relay_mode(mode)

    def f(k):
        eta = goodput(mode, ChannelParams(gamma, alpha, k), rate).goodput
        if trace is not None:
            trace.append((rate, k, eta))
        return eta

    k, eta, _ = _grid_then_refine(f, k_grid(), tol)
    return KOpt(k, eta)


def optimize_rate(mode, gamma, alpha, k=0.5, r_min=RATE_RANGE[0], r_max=RATE_RANGE[1],
                  tol=TOL, trace=None):
    """Rate maximizing goodput at a fixed relay location.

    ``interior`` is False when the best grid point sits on the search
    boundary, meaning the true optimum may lie outside ``[r_min, r_max]``.
    """
    mode = Mode(mode)
    if not 0 < r_min < r_max:
        raise DomainError(f"need 0 < r_min < r_max, got {r_min!r}, {r_max!r}")
    params = ChannelParams(gamma, alpha, k)

    def f(r):
        eta = goodput(mode, params, r).goodput
        if trace is not None:
            trace.append((r, k, eta))
        return eta

    r, eta, interior = _grid_then_refine(f, rate_grid(r_min, r_max), tol)
    return RateOpt(r, eta, interior)


def optimize_joint(mode, gamma, alpha, r_min=RATE_RANGE[0], r_max=RATE_RANGE[1],
                   start=(0.5, 1.0), grid_size=50, max_sweeps=50, tol=1e-9):
    """Jointly optimal relay location and rate by coordinate ascent.

    A coarse ``grid_size`` x ``grid_size`` scan over (k, R) picks the start
    unless ``start`` is already better; then k and R are re-optimized in
    turn until the goodput gain of a sweep drops below ``tol``.
    """
    mode = _relay_mode(mode)
    trace = []

    def f(k, r):
        eta = goodput(mode, ChannelParams(gamma, alpha, k), r).goodput
        trace.append((r, k, eta))
        return eta

    best_k, best_r = start
    best = f(best_k, best_r)
    for k in k_grid(grid_size):
        for r in rate_grid(r_min, r_max, grid_size):
            eta = f(float(k), float(r))
            if eta > best:
                best, best_k, best_r = eta, float(k), float(r)

    sweeps = 0
    interior = True
    while sweeps < max_sweeps:
        sweeps += 1
        previous = best
        k_opt = optimize_k(mode, gamma, alpha, best_r, trace=trace)
        if k_opt.goodput > best:
            best, best_k = k_opt.goodput, k_opt.k
        r_opt = optimize_rate(mode, gamma, alpha, best_k, r_min, r_max, trace=trace)
        interior = r_opt.interior
        if r_opt.goodput > best:
            best, best_r = r_opt.goodput, r_opt.rate
        if best - previous < tol:
            break
    return OptResult(mode, best_r, best_k, best, sweeps, interior, trace)
