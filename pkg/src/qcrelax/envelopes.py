"""McCormick envelopes for ``z = xy``, ``z = x*beta`` (binary beta) and ``y = x^2``.

Every builder returns a :class:`LinearFragment` of ``>=``/``<=`` rows over
host variables given by name.  No new variables are declared here.
"""
from __future__ import annotations

from typing import Tuple

import numpy as np

from .model import Interval, LinearFragment, linear_combination, row

__all__ = [
    "LinearFragment",
    "bilinear_envelope",
    "binary_envelope",
    "square_envelope",
    "mccormick_bounds",
    "mccormick_max_error",
]


def bilinear_envelope(x: str, xb: Interval, y: str, yb: Interval, z: str) -> LinearFragment:
    """The four McCormick inequalities for ``z = xy`` over ``xb x yb``.

    ``x`` and ``y`` may name the same variable; coefficients are merged.
    """
    xl, xu, yl, yu = xb.lo, xb.hi, yb.lo, yb.hi
    rows = [
        # z >= xl*y + x*yl - xl*yl
        row(linear_combination((z, 1.0), (y, -xl), (x, -yl)), ">=", -xl * yl, "mc_lo1"),
        # z >= xu*y + x*yu - xu*yu
        row(linear_combination((z, 1.0), (y, -xu), (x, -yu)), ">=", -xu * yu, "mc_lo2"),
        # z <= xu*y + x*yl - xu*yl
        row(linear_combination((z, 1.0), (y, -xu), (x, -yl)), "<=", -xu * yl, "mc_up1"),
        # z <= xl*y + x*yu - xl*yu
        row(linear_combination((z, 1.0), (y, -xl), (x, -yu)), "<=", -xl * yu, "mc_up2"),
    ]
    return LinearFragment([], rows)


def binary_envelope(x: str, xb: Interval, beta: str, z: str) -> LinearFragment:
    """McCormick envelope of ``z = x * beta`` with ``beta`` binary; exact once beta is integral."""
    xl, xu = xb.lo, xb.hi
    rows = [
        row({z: 1.0, beta: -xl}, ">=", 0.0, "bin_lo1"),                 # z >= xl*beta
        row({z: 1.0, beta: -xu}, "<=", 0.0, "bin_up1"),                 # z <= xu*beta
        row({z: 1.0, x: -1.0, beta: -xu}, ">=", -xu, "bin_lo2"),        # z >= x - xu(1-beta)
        row({z: 1.0, x: -1.0, beta: -xl}, "<=", -xl, "bin_up2"),        # z <= x - xl(1-beta)
    ]
    return LinearFragment([], rows)


def square_envelope(x: str, xb: Interval, y: str) -> LinearFragment:
    """Tangents at both interval ends plus the secant for ``y = x^2``."""
    xl, xu = xb.lo, xb.hi
    rows = [
        row({y: 1.0, x: -2.0 * xl}, ">=", -xl * xl, "sq_lo1"),
        row({y: 1.0, x: -2.0 * xu}, ">=", -xu * xu, "sq_lo2"),
        row({y: 1.0, x: -(xl + xu)}, "<=", -xl * xu, "sq_up"),
    ]
    return LinearFragment([], rows)


def mccormick_bounds(x, y, xb: Interval, yb: Interval) -> Tuple[np.ndarray, np.ndarray]:
    """Pointwise lower and upper McCormick bounds on ``xy`` (vectorized)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xl, xu, yl, yu = xb.lo, xb.hi, yb.lo, yb.hi
    lower = np.maximum(xl * y + x * yl - xl * yl, xu * y + x * yu - xu * yu)
    upper = np.minimum(xu * y + x * yl - xu * yl, xl * y + x * yu - xl * yu)
    return lower, upper


def mccormick_max_error(xb: Interval, yb: Interval) -> Tuple[float, Tuple[float, float]]:
    """Largest under-/overestimation of ``xy`` by the envelope and where it occurs.

    Returns ``(xb.width * yb.width / 4, (xb.mid, yb.mid))``.
    """
    return 0.25 * xb.width * yb.width, (xb.mid, yb.mid)
