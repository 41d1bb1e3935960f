import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qcrelax.analysis import FixedPointProbe
from qcrelax.envelopes import bilinear_envelope
from qcrelax.model import UNIT, ModelBuilder, Status, continuous, row
from qcrelax.sawtooth import build_epigraph_relaxation
from qcrelax.solver import LpProblem, SimplexState, solve_lp


def _vertex_optimum(A, b, c, lo, hi):
    """min c'x over {Ax <= b, lo <= x <= hi} by enumerating basic solutions."""
    n = len(c)
    G = np.vstack([A, np.eye(n), -np.eye(n)])
    h = np.concatenate([b, hi, -lo])
    best = np.inf
    for rows in itertools.combinations(range(len(h)), n):
        M = G[list(rows)]
        if abs(np.linalg.det(M)) < 1e-9:
            continue
        x = np.linalg.solve(M, h[list(rows)])
        if np.all(G @ x <= h + 1e-7):
            best = min(best, float(c @ x))
    return best


@given(st.integers(1, 4), st.integers(1, 6), st.integers(0, 100_000))
def test_matches_vertex_enumeration(n, m, seed):
    rng = np.random.default_rng(seed)
    A = np.round(rng.normal(size=(m, n)), 2)
    b = np.round(rng.normal(size=m), 2)
    c = np.round(rng.normal(size=n), 2)
    lo = np.round(rng.uniform(-2, 0, n), 2)
    hi = lo + np.round(rng.uniform(0, 3, n), 2)
    bld = ModelBuilder()
    for j in range(n):
        bld.add_var(continuous(f"v{j}", lo[j], hi[j]))
        bld.add_objective(f"v{j}", c[j])
    for i in range(m):
        bld.add_row(row({f"v{j}": A[i, j] for j in range(n)}, "<=", b[i]))
    sol = solve_lp(bld.build())
    want = _vertex_optimum(A, b, c, lo, hi)
    if np.isinf(want):
        assert sol.status is Status.INFEASIBLE
    else:
        assert sol.status is Status.OPTIMAL
        assert sol.objective_value == pytest.approx(want, abs=1e-7)


def test_mccormick_max_product_at_corner():
    b = ModelBuilder()
    for v in "xyz":
        b.add_var(continuous(v, 0, 1))
    b.add_fragment(bilinear_envelope("x", UNIT, "y", UNIT, "z"))
    b.add_objective("z", -1.0)
    sol = solve_lp(b.build())
    assert sol.status is Status.OPTIMAL and sol["z"] == pytest.approx(1.0)


def test_epigraph_minimum_at_quarter():
    b = ModelBuilder()
    b.add_var(continuous("x", 0.25, 0.25))
    b.add_var(continuous("y", 0, 1))
    b.add_fragment(build_epigraph_relaxation("x", "y", 1, "s_"))
    b.add_objective("y", 1.0)
    assert solve_lp(b.build()).objective_value == pytest.approx(0.0625)


def test_infeasible_toy():
    b = ModelBuilder()
    b.add_var(continuous("x", -5, 5))
    b.add_row(row({"x": 1.0}, ">=", 1.0))
    b.add_row(row({"x": 1.0}, "<=", 0.0))
    assert solve_lp(b.build()).status is Status.INFEASIBLE


def test_unbounded():
    b = ModelBuilder()
    b.add_var(continuous("x", 0))
    b.add_objective("x", -1.0)
    assert solve_lp(b.build()).status is Status.UNBOUNDED


def test_equality_and_free_columns():
    b = ModelBuilder()
    b.add_var(continuous("x"))
    b.add_var(continuous("y", -1, 1))
    b.add_row(row({"x": 1.0, "y": 1.0}, "==", 2.0))
    b.add_objective("x", 1.0)
    sol = solve_lp(b.build())
    assert sol["x"] == pytest.approx(1.0) and sol["y"] == pytest.approx(1.0)


def test_warm_resolve_after_infeasible_bounds():
    # an infeasible cold start must not leave phase-I costs behind for the next solve
    b = ModelBuilder()
    for v in "xyz":
        b.add_var(continuous(v, 0, 1))
    b.add_fragment(bilinear_envelope("x", UNIT, "y", UNIT, "z"))
    b.add_row(row({"x": 1.0, "y": 1.0}, "<=", 1.5))
    probe = FixedPointProbe(b.build())
    assert probe.maximize("z", {"x": 1.0, "y": 1.0}) == -np.inf
    assert probe.maximize("z", {"x": 0.5, "y": 0.8}) == pytest.approx(0.5)
    assert probe.minimize("z", {"x": 1.0, "y": 1.0}) == np.inf
    assert probe.minimize("z", {"x": 0.5, "y": 0.8}) == pytest.approx(0.3)


@given(st.integers(0, 10_000))
def test_warm_bound_changes_match_cold_solves(seed):
    rng = np.random.default_rng(seed)
    n, m = 4, 5
    A = rng.normal(size=(m, n))
    prob = LpProblem(A, np.full(m, -np.inf), rng.uniform(0, 2, m), rng.normal(size=n),
                     np.zeros(n), np.ones(n))
    st_ = SimplexState(prob)
    st_.solve()
    for _ in range(8):
        j = int(rng.integers(n))
        v = float(rng.integers(0, 2))
        lb, ub = st_.lb[:n].copy(), st_.ub[:n].copy()
        lb[j] = ub[j] = v
        st_.set_bounds([j], [v], [v])
        warm = st_.solve()
        cold = SimplexState(prob, lb, ub)
        cs = cold.solve()
        assert warm is cs
        if cs is Status.OPTIMAL:
            assert st_.objective == pytest.approx(cold.objective, abs=1e-8)
        if rng.random() < 0.3:
            st_.set_bounds(np.arange(n), np.zeros(n), np.ones(n))
