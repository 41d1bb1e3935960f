"""Closed-form and empirical error measures of projected relaxations on the unit box.

Everything here works on the projection of a relaxation onto ``(x, y, z)``
(bilinear, ``z ~ xy``) or ``(x, z)`` (univariate, ``z ~ x^2``).  Once the
digits of the discretized variables are fixed by the point itself, each digit
product is exact and only the residual McCormick envelopes leave slack, so the
projected bounds have closed forms.  ``lp_probes`` cross-checks these against
LP solves on the generated models.
"""
from __future__ import annotations

from typing import Optional, Tuple

import numpy as np

from ..envelopes import mccormick_bounds, mccormick_max_error
from ..errors import ConfigError
from ..model import UNIT, Interval, Method, default_tightening_depth
from ..sawtooth import sawtooth_value

SER = "ser"


def parse_method(method):
    """``Method`` member, or the string ``"ser"`` for the bare sawtooth epigraph relaxation."""
    if isinstance(method, str) and method.lower() == SER:
        return SER
    return Method.parse(method)


def _digit_split(x, L):
    h = 2.0 ** (-L)
    k = np.minimum(np.floor(np.asarray(x, float) / h), 2 ** L - 1)
    return k * h, np.asarray(x, float) - k * h, h


# ---------------------------------------------------------------------------
# theory
# ---------------------------------------------------------------------------

def univariate_nmdt_theory(L: int) -> Tuple[float, float]:
    """(under, over) maximum errors of univariate NMDT.

    Under: ``2^-L-2 - 2^-3L-2 (1 + 2^-L)^-2``.  Over: ``2^-4`` at ``L = 1``,
    otherwise ``2^-L-2 - 2^-3L-2 (1 - 2^-L)^-2``.
    """
    h = 2.0 ** (-L)
    under = 2.0 ** (-L - 2) - 2.0 ** (-3 * L - 2) / (1.0 + h) ** 2
    over = 2.0 ** -4 if L == 1 else 2.0 ** (-L - 2) - 2.0 ** (-3 * L - 2) / (1.0 - h) ** 2
    return under, over


def max_error_theoretical(method, L: int, univariate: bool = False) -> Optional[float]:
    """Closed-form maximum error; ``None`` where no closed form is known.

    >>> max_error_theoretical("nmdt", 4)
    0.015625
    """
    m = parse_method(method)
    if L < 1 and m is not Method.MCCORMICK:
        raise ConfigError("L must be at least 1")
    if m == SER:
        return 2.0 ** (-2 * L - 4)
    if m is Method.MCCORMICK:
        return 0.25
    if univariate:
        if m is Method.NMDT:
            return max(univariate_nmdt_theory(L))
        if m is Method.DNMDT:
            return 2.0 ** (-2 * L - 2)
        return None
    if m in (Method.NMDT, Method.TNMDT):
        return 2.0 ** (-L - 2)
    return 2.0 ** (-2 * L - 2)


def avg_width_theoretical(method, L: int, univariate: bool = False) -> Optional[float]:
    """Average vertical width of the projected MIP relaxation; ``None`` if unknown."""
    m = parse_method(method)
    if m is Method.MCCORMICK:
        return 0.25 if univariate else 1.0 / 6.0
    if univariate:
        return 0.25 * 4.0 ** (-L) if m is Method.DNMDT else None
    if m in (Method.NMDT, Method.TNMDT):
        return 2.0 ** (-L) / 6.0
    if m in (Method.DNMDT, Method.TDNMDT):
        return 4.0 ** (-L) / 6.0
    return None


# ---------------------------------------------------------------------------
# projected bounds
# ---------------------------------------------------------------------------

def sawtooth_epigraph_lower(x, L: int):
    """Lower envelope of ``Q^L`` at ``x``: ``max(0, 2x-1, F^j(x) - 2^-2j-2 for j = 0..L)``."""
    x = np.asarray(x, float)
    low = np.maximum(0.0, 2.0 * x - 1.0)
    for j in range(L + 1):
        low = np.maximum(low, sawtooth_value(x, j) - 2.0 ** (-2 * j - 2))
    return low


def projected_bounds(method, L: int, x, y=None, L1: Optional[int] = None):
    """Lower and upper bounds on ``z`` over the projected MIP relaxation at given points.

    With ``y`` omitted the univariate relaxation of ``x^2`` is used.
    Bilinear NMDT discretizes ``x``.  The sawtooth epigraph has no upper bound.
    """
    m = parse_method(method)
    x = np.asarray(x, float)
    if m == SER:
        return sawtooth_epigraph_lower(x, L), np.full(x.shape, np.inf)
    if y is None:
        return _univariate_bounds(m, L, x, L1)
    y = np.asarray(y, float)
    if m is Method.MCCORMICK:
        return mccormick_bounds(x, y, UNIT, UNIT)
    base_x, dx, h = _digit_split(x, L)
    if m in (Method.NMDT, Method.TNMDT):
        lo, hi = mccormick_bounds(dx, y, Interval(0.0, h), UNIT)
        return base_x * y + lo, base_x * y + hi
    base_y, dy, _ = _digit_split(y, L)
    # xy = base_x*y + base_y*x - base_x*base_y + dx*dy
    exact = base_x * y + base_y * x - base_x * base_y
    lo, hi = mccormick_bounds(dx, dy, Interval(0.0, h), Interval(0.0, h))
    return exact + lo, exact + hi


def _univariate_bounds(m, L, x, L1):
    if m is Method.MCCORMICK:
        return np.maximum(0.0, 2.0 * x - 1.0), x.copy()
    base, dx, h = _digit_split(x, L)
    if m in (Method.NMDT, Method.TNMDT):
        # z = base*x + dx*x with dx*x in M(dx, x) over [0, h] x [0, 1]
        lo, hi = mccormick_bounds(dx, x, Interval(0.0, h), UNIT)
        lo, hi = base * x + lo, base * x + hi
    else:
        # z = base*(dx + x) + dx^2 with dx^2 under the square envelope on [0, h]
        exact = base * (dx + x)
        lo = exact + np.maximum(0.0, 2.0 * h * dx - h * h)
        hi = exact + h * dx
    if m.tightened:
        lo = np.maximum(lo, sawtooth_epigraph_lower(x, L1 or default_tightening_depth(L)))
    return lo, hi


# ---------------------------------------------------------------------------
# empirical maxima
# ---------------------------------------------------------------------------

def _piece_grid(L: int, resolution: int):
    """Points covering every digit cell of depth ``L`` including both cell ends."""
    h = 2.0 ** (-L)
    per = max(2, resolution // 2 ** L)
    t = np.linspace(0.0, h, per + 1)
    k = np.arange(2 ** L)[:, None]
    return k * h, t[None, :], h


def univariate_error_sides(method, L: int, resolution: int = 100_000, L1: Optional[int] = None):
    """(under, over) maximum errors of a univariate relaxation by grid search per digit cell.

    Cells are closed, so a breakpoint is also probed with the all-lower digits
    and a full residual, as the MIP allows.
    """
    m = parse_method(method)
    base, t, h = _piece_grid(L, resolution)
    x = base + t
    if m in (Method.NMDT, Method.TNMDT):
        lo = base * x + np.maximum(0.0, h * x + t - h)
        hi = base * x + np.minimum(h * x, t)
    elif m in (Method.DNMDT, Method.TDNMDT):
        lo = base * (t + x) + np.maximum(0.0, 2.0 * h * t - h * h)
        hi = base * (t + x) + h * t
    else:
        raise ConfigError(f"no univariate grid model for {method}")
    if m.tightened:
        lo = np.maximum(lo, sawtooth_epigraph_lower(np.clip(x, 0.0, 1.0), L1 or default_tightening_depth(L)))
    sq = x * x
    return float(np.max(sq - lo)), float(np.max(hi - sq))


def max_error_empirical(method, L: int, resolution: int = 100_000, univariate: bool = False,
                        L1: Optional[int] = None) -> float:
    """Maximum pointwise error by enumerating digit cells.

    Bilinear relaxations use the exact per-cell McCormick maximum
    ``width_x * width_y / 4``; univariate ones search a grid of ``resolution``
    points spread over the cells.
    """
    m = parse_method(method)
    if m == SER:
        x = np.linspace(0.0, 1.0, resolution + 1)
        return float(np.max(x * x - sawtooth_epigraph_lower(x, L)))
    if univariate:
        if m is Method.MCCORMICK:
            return 0.25
        return max(univariate_error_sides(m, L, resolution, L1))
    if m is Method.MCCORMICK:
        return mccormick_max_error(UNIT, UNIT)[0]
    h = 2.0 ** (-L)
    worst = 0.0
    if m in (Method.NMDT, Method.TNMDT):
        for k in range(2 ** L):
            worst = max(worst, mccormick_max_error(Interval(k * h, (k + 1) * h), UNIT)[0])
    else:
        for kx in range(2 ** L):
            for ky in range(2 ** L):
                cell = mccormick_max_error(Interval(kx * h, (kx + 1) * h), Interval(ky * h, (ky + 1) * h))
                worst = max(worst, cell[0])
    return worst


# ---------------------------------------------------------------------------
# average widths
# ---------------------------------------------------------------------------

def avg_width_empirical(method, L: int, samples: int = 1_000_000, seed: int = 42,
                        univariate: bool = False, L1: Optional[int] = None,
                        chunk: int = 250_000) -> Tuple[float, float]:
    """Monte-Carlo mean of (upper - lower) over uniform points; returns ``(estimate, stderr)``."""
    if samples < 2:
        raise ConfigError("need at least two samples")
    rng = np.random.default_rng(seed)
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < samples:
        k = min(chunk, samples - done)
        x = rng.random(k)
        y = None if univariate else rng.random(k)
        lo, hi = projected_bounds(method, L, x, y, L1)
        w = hi - lo
        total += float(w.sum())
        total_sq += float((w * w).sum())
        done += k
    mean = total / samples
    var = max(total_sq / samples - mean * mean, 0.0) * samples / (samples - 1)
    return mean, float(np.sqrt(var / samples))
