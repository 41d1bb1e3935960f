"""LP-based probes on generated models: fixed-point ranges, volumes, sharpness.

A ``FixedPointProbe`` keeps one warm simplex tableau per objective so that
thousands of probes differing only in fixed variable values cost a few dual
simplex pivots each.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, Mapping, Optional, Tuple

import numpy as np

from ..envelopes import mccormick_bounds
from ..model import UNIT, Interval, LinearFragment, MiqcqpInstance, MipModel, ModelBuilder, \
    RelaxConfig, Status, continuous
from ..relaxer import build_relaxation
from ..sawtooth import build_epigraph_relaxation
from ..solver.lp import LpProblem, SimplexState
from .error import projected_bounds


class FixedPointProbe:
    """Optimize or test feasibility of a model's LP relaxation with some variables fixed."""

    def __init__(self, model: MipModel):
        self.model = model
        self.prob = LpProblem.from_model(model)
        self.index = model.index
        self._states: Dict[Tuple[str, int], SimplexState] = {}

    def _state(self, var: Optional[str], sign: int) -> SimplexState:
        key = (var, sign)
        st = self._states.get(key)
        if st is None:
            c = np.zeros(self.prob.n)
            if var is not None:
                c[self.index[var]] = sign
            st = SimplexState(self.prob, c=c)
            self._states[key] = st
        return st

    def _fix(self, st: SimplexState, fixed: Mapping[str, float]):
        idx = [self.index[k] for k in fixed]
        vals = np.array([float(v) for v in fixed.values()])
        # keep all probed variables at their fixed values; others keep model bounds
        st.set_bounds(idx, vals, vals)

    def feasible(self, fixed: Mapping[str, float]) -> bool:
        st = self._state(None, 0)
        self._fix(st, fixed)
        return st.solve() is Status.OPTIMAL

    def minimize(self, var: str, fixed: Mapping[str, float]) -> float:
        """LP minimum of ``var``; ``inf`` when the fixings are infeasible."""
        st = self._state(var, 1)
        self._fix(st, fixed)
        status = st.solve()
        if status is Status.INFEASIBLE:
            return np.inf
        if status is Status.UNBOUNDED:
            return -np.inf
        return float(st.values[self.index[var]])

    def maximize(self, var: str, fixed: Mapping[str, float]) -> float:
        st = self._state(var, -1)
        self._fix(st, fixed)
        status = st.solve()
        if status is Status.INFEASIBLE:
            return -np.inf
        if status is Status.UNBOUNDED:
            return np.inf
        return float(st.values[self.index[var]])


def univariate_relaxation(method, L: int, L1: Optional[int] = None):
    """Relaxation of ``y = x^2`` on ``[0, 1]``; model variables ``x0`` and ``z0_0``."""
    inst = MiqcqpInstance.create([Interval(0.0, 1.0)], Q0=np.ones((1, 1)), name="square")
    return build_relaxation(inst, RelaxConfig(method, L, L1))


def bilinear_relaxation(method, L: int, lam: float = 0.5):
    """Relaxation of ``z = xy`` on the unit square; model variables ``x0``, ``x1``, ``z0_1``."""
    inst = MiqcqpInstance.create([UNIT, UNIT], Q0=np.array([[0.0, 0.5], [0.5, 0.0]]), name="product")
    return build_relaxation(inst, RelaxConfig(method, L, lam=lam))


def lp_volume_univariate(method, L: int, samples: int = 100_000, seed: int = 42,
                         L1: Optional[int] = None) -> Tuple[float, float]:
    """Monte-Carlo area between LP-max and LP-min of ``x^2``'s lift with binaries relaxed.

    Returns ``(estimate, stderr)``.
    """
    rel = univariate_relaxation(method, L, L1)
    probe = FixedPointProbe(rel.model)
    rng = np.random.default_rng(seed)
    xs = rng.random(samples)
    w = np.empty(samples)
    for i, x in enumerate(xs):
        fx = {"x0": x}
        w[i] = probe.maximize("z0_0", fx) - probe.minimize("z0_0", fx)
    return float(w.mean()), float(w.std(ddof=1) / np.sqrt(samples))


def sawtooth_lp_gap(L: int, points: int = 2 ** 14 + 1) -> Tuple[float, float]:
    """Largest ``x^2 - min y`` over the LP ``Q^L`` on a uniform x grid; returns ``(gap, x)``.

    The gap peaks at kinks on dyadic points, so the default grid spacing is a
    power of two; a decimal grid can miss the peak by a few ``1e-6``.
    """
    b = ModelBuilder("epigraph")
    b.add_var(continuous("x", 0.0, 1.0))
    b.add_var(continuous("y", 0.0, 1.0))
    b.add_fragment(build_epigraph_relaxation("x", "y", L, "s_"))
    probe = FixedPointProbe(b.build())
    best, arg = -np.inf, 0.0
    for x in np.linspace(0.0, 1.0, points):
        gap = x * x - probe.minimize("y", {"x": x})
        if gap > best:
            best, arg = gap, float(x)
    return float(best), arg


def avg_width_lp(method, L: int, samples: int = 200, seed: int = 0,
                 univariate: bool = False, L1: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
    """Width of the projected MIP relaxation at random points via LPs with digits fixed.

    Returns ``(lp_widths, closed_form_widths)`` for the same points, as a
    cross-check of ``projected_bounds``.
    """
    rel = univariate_relaxation(method, L, L1) if univariate else bilinear_relaxation(method, L)
    probe = FixedPointProbe(rel.model)
    rng = np.random.default_rng(seed)
    zname = "z0_0" if univariate else "z0_1"
    lp_w, cf_w = np.empty(samples), np.empty(samples)
    for s in range(samples):
        x = rng.random(2)
        pt = (x[0],) if univariate else (x[0], x[1])
        vals = rel.extend(np.array(pt))
        fixed = {f"x{i}": v for i, v in enumerate(pt)}
        fixed.update({b: vals[b] for b in rel.model.binaries})
        lp_w[s] = probe.maximize(zname, fixed) - probe.minimize(zname, fixed)
        lo, hi = projected_bounds(method, L, pt[0], None if univariate else pt[1], L1)
        cf_w[s] = float(hi - lo)
    return lp_w, cf_w


# ---------------------------------------------------------------------------
# sharpness
# ---------------------------------------------------------------------------

@dataclass
class SharpnessReport:
    inside_checked: int
    outside_checked: int
    counterexample: Optional[Tuple[float, float, float]] = None
    inside_expected: bool = True

    @property
    def passed(self) -> bool:
        return self.counterexample is None


def sharpness_probe(builder: Callable[[str, str, str], LinearFragment], n_points: int = 500,
                    seed: int = 0, margin: float = 1e-6) -> SharpnessReport:
    """Compare the LP projection of a bilinear fragment with the unit-box McCormick envelope.

    ``builder(z, x, y)`` returns a fragment over host variables on ``[0, 1]``.
    Points are drawn uniformly from the unit cube and sorted into inside and
    outside the envelope; those within ``margin`` of its boundary are
    discarded.  Inside points must extend LP-feasibly, outside points must not.
    """
    b = ModelBuilder("sharpness")
    for v in ("x", "y", "z"):
        b.add_var(continuous(v, 0.0, 1.0))
    b.add_fragment(builder("z", "x", "y"))
    probe = FixedPointProbe(b.build())
    rng = np.random.default_rng(seed)
    inside = outside = 0
    while inside < n_points or outside < n_points:
        x, y, z = rng.random(3)
        lo, hi = mccormick_bounds(x, y, UNIT, UNIT)
        if lo + margin < z < hi - margin:
            if inside >= n_points:
                continue
            inside += 1
            if not probe.feasible({"x": x, "y": y, "z": z}):
                return SharpnessReport(inside, outside, (x, y, z), True)
        elif z < lo - margin or z > hi + margin:
            if outside >= n_points:
                continue
            outside += 1
            if probe.feasible({"x": x, "y": y, "z": z}):
                return SharpnessReport(inside, outside, (x, y, z), False)
    return SharpnessReport(inside, outside)


def lower_convex_envelope(xs: np.ndarray, ys: np.ndarray):
    """Vertices of the lower convex hull of points sorted by ``xs`` (monotone chain)."""
    hull = []
    for p in zip(xs, ys):
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (x2 - x1) * (p[1] - y1) - (y2 - y1) * (p[0] - x1) <= 0:
                hull.pop()
            else:
                break
        hull.append(p)
    h = np.array(hull)
    return h[:, 0], h[:, 1]


def hull_lower(method, L: int, x: float, L1: Optional[int] = None, grid: int = 1 << 14) -> float:
    """Lower boundary at ``x`` of the convex hull of the projected univariate MIP relaxation."""
    g = np.linspace(0.0, 1.0, grid + 1)
    lo, _ = projected_bounds(method, L, g, None, L1)
    hx, hy = lower_convex_envelope(g, lo)
    return float(np.interp(x, hx, hy))


@dataclass
class WitnessReport:
    method: str
    L: int
    point: Tuple[float, float]
    lp_feasible: bool
    hull_lower: float

    @property
    def outside_hull(self) -> bool:
        return self.point[1] < self.hull_lower - 1e-9

    @property
    def confirmed(self) -> bool:
        return self.lp_feasible and self.outside_hull


def univariate_witness(method, L: int, L1: Optional[int] = None) -> WitnessReport:
    """Check the point ``x = 1/2, y = 0`` with every digit at ``1/2`` and ``dx = 2^-L-1``.

    It satisfies the LP relaxation of the univariate model yet lies below the
    convex hull of the mixed-integer projection.
    """
    rel = univariate_relaxation(method, L, L1)
    digits = rel.term_map.digits[0]
    fixed = {"x0": 0.5, "z0_0": 0.0, digits.delta: 2.0 ** (-L - 1)}
    fixed.update({b: 0.5 for b in digits.beta})
    feasible = FixedPointProbe(rel.model).feasible(fixed)
    return WitnessReport(str(rel.config.method.value), L, (0.5, 0.0), feasible, hull_lower(method, L, 0.5, L1))
