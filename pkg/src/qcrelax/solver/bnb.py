"""Best-bound branch and bound over binary variables.

A single simplex tableau serves the whole tree.  Moving to another node only
changes binary bounds; nonbasic columns are parked on the bound that keeps the
basis dual feasible, so the dual simplex re-optimizes without a refactor.
The basis is refactored every ``REFACTOR_EVERY`` solves to shed round-off.
"""
from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..errors import ConfigError, NumericalFailure
from ..model import MipModel, Solution, Status
from .lp import LpProblem, SimplexState

INT_TOL = 1e-6
REFACTOR_EVERY = 40


@dataclass(frozen=True)
class SolveLimits:
    max_nodes: int = 1_000_000
    max_seconds: float = 3600.0
    rel_gap: float = 1e-4
    feas_tol: float = 1e-7
    lp_pivot_tol: float = 1e-9
    abs_gap: float = 1e-9
    heuristic_every: int = 25

    def __post_init__(self):
        for name in ("max_nodes", "max_seconds", "feas_tol", "lp_pivot_tol"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if self.rel_gap < 0 or self.abs_gap < 0:
            raise ConfigError("gap tolerances must be non-negative")


@dataclass
class MipResult:
    incumbent: Optional[Solution]
    dual_bound: float
    node_count: int
    status: Status
    seconds: float = 0.0
    branch_log: List[int] = field(default_factory=list, repr=False)

    @property
    def primal_bound(self) -> float:
        return self.incumbent.objective_value if self.incumbent is not None else math.inf


def compute_gap(primal: float, dual: float) -> float:
    """Relative gap ``|primal - dual| / max(|primal|, 1e-10)``."""
    return abs(primal - dual) / max(abs(primal), 1e-10)


@dataclass(order=True)
class _Node:
    key: Tuple[float, int, int]
    bound: float = field(compare=False)
    depth: int = field(compare=False)
    fixed: Dict[int, float] = field(compare=False)


class _Search:
    def __init__(self, model, limits: SolveLimits, heuristic=None):
        self.heuristic = heuristic
        self.prob = model if isinstance(model, LpProblem) else LpProblem.from_model(model)
        self.limits = limits
        p = self.prob
        self.ints = np.flatnonzero(p.integer) if p.integer is not None else np.zeros(0, dtype=np.int64)
        self.state = SimplexState(p)
        self.cur_fixed: Dict[int, float] = {}
        self.warm_solves = 0
        self.incumbent: Optional[np.ndarray] = None
        self.inc_obj = math.inf
        self.pruned_min = math.inf
        self.branch_log: List[int] = []

    # -- LP plumbing -------------------------------------------------------

    def _apply(self, fixed: Dict[int, float]):
        p, st = self.prob, self.state
        changed = [j for j in set(fixed) | set(self.cur_fixed) if fixed.get(j) != self.cur_fixed.get(j)]
        for j in sorted(changed):
            if j in fixed:
                st.set_bounds(j, fixed[j], fixed[j])
            else:
                st.set_bounds(j, p.lb[j], p.ub[j])
        self.cur_fixed = dict(fixed)

    def _rows_ok(self, x, tol) -> bool:
        p = self.prob
        act = p.A @ x
        scale = 1.0 + np.abs(p.A) @ np.abs(x)
        return bool(np.all(act >= p.row_lo - tol * scale) and np.all(act <= p.row_hi + tol * scale))

    def solve_node(self, node: _Node) -> Status:
        st = self.state
        if st.T is not None and self.warm_solves >= REFACTOR_EVERY:
            # periodic refactor of the live basis bounds round-off drift
            if not st.restore(st.basis_snapshot()):
                st.T = None
            self.warm_solves = 0
        self._apply(node.fixed)
        status = st.solve()
        self.warm_solves += 1
        if status is Status.OPTIMAL and not self._rows_ok(st.values, 1e-6):
            # drift: rebuild the tableau from the current basis and re-solve
            if st.restore(st.basis_snapshot()):
                status = st.solve()
            if status is Status.OPTIMAL and not self._rows_ok(st.values, 1e-6):
                st.T = None
                status = st.solve()
            self.warm_solves = 0
        return status

    # -- incumbents ---------------------------------------------------------

    def _fractional(self, x) -> int:
        if self.ints.size == 0:
            return -1
        v = x[self.ints]
        frac = np.minimum(v - np.floor(v), np.ceil(v) - v)
        best = frac.max()
        if best <= INT_TOL:
            return -1
        return int(self.ints[np.flatnonzero(frac >= best - 1e-12)[0]])

    def _offer(self, x, obj):
        if obj < self.inc_obj:
            xr = x.copy()
            xr[self.ints] = np.round(xr[self.ints])
            self.incumbent, self.inc_obj = xr, obj

    def _round_heuristic(self, node: _Node, x):
        """Fix every binary (rounded LP value, or the caller's heuristic) and re-solve."""
        fixed = dict(node.fixed)
        for j in self.ints:
            fixed[int(j)] = float(np.round(x[j]))
        if self.heuristic is not None:
            fixed.update(self.heuristic(x) or {})
        self._apply(fixed)
        status = self.state.solve()
        if status is Status.OPTIMAL and self._rows_ok(self.state.values, self.limits.feas_tol * 10):
            self._offer(self.state.values, self.state.objective)
        self._apply(node.fixed)

    def _tolerance(self) -> float:
        return max(self.limits.abs_gap, self.limits.rel_gap * max(abs(self.inc_obj), 1e-10))

    # -- main loop ----------------------------------------------------------

    def run(self) -> MipResult:
        t0 = time.perf_counter()
        lim = self.limits
        heap: List[_Node] = []
        seq = 0
        heapq.heappush(heap, _Node((-math.inf, 0, seq), -math.inf, 0, {}))
        nodes = 0
        status = Status.OPTIMAL
        root_unbounded = False
        while heap:
            if nodes >= lim.max_nodes or time.perf_counter() - t0 > lim.max_seconds:
                status = Status.LIMIT
                break
            node = heapq.heappop(heap)
            if node.bound >= self.inc_obj - self._tolerance():
                self.pruned_min = min(self.pruned_min, node.bound)
                continue
            st_lp = self.solve_node(node)
            nodes += 1
            if st_lp is Status.INFEASIBLE:
                continue
            if st_lp is Status.UNBOUNDED:
                if nodes == 1:
                    root_unbounded = True
                    break
                raise NumericalFailure("unbounded LP below a bounded root")
            x = self.state.values
            obj = self.state.objective
            bound = max(obj, node.bound)
            if bound >= self.inc_obj - self._tolerance():
                self.pruned_min = min(self.pruned_min, bound)
                continue
            j = self._fractional(x)
            if j < 0:
                self._offer(x, obj)
                continue
            self.branch_log.append(j)
            first = 1.0 if x[j] >= 0.5 else 0.0
            for val in (first, 1.0 - first):
                seq += 1
                fixed = dict(node.fixed)
                fixed[j] = val
                heapq.heappush(heap, _Node((bound, -(node.depth + 1), seq), bound, node.depth + 1, fixed))
            if nodes == 1 or (lim.heuristic_every and nodes % lim.heuristic_every == 0):
                self._round_heuristic(node, x)
        elapsed = time.perf_counter() - t0

        if root_unbounded:
            return MipResult(None, -math.inf, nodes, Status.UNBOUNDED, elapsed, self.branch_log)
        open_min = min((n.bound for n in heap), default=math.inf)
        dual = min(open_min, self.pruned_min, self.inc_obj)
        if status is Status.LIMIT and not heap:
            status = Status.OPTIMAL
        if status is Status.LIMIT and self.incumbent is not None and \
                self.inc_obj - open_min <= self._tolerance():
            status = Status.OPTIMAL
        inc = None
        if self.incumbent is not None:
            names = self.prob.names or [f"v{i}" for i in range(self.prob.n)]
            inc = Solution(dict(zip(names, self.incumbent.tolist())), self.inc_obj,
                           Status.OPTIMAL if status is Status.OPTIMAL else Status.FEASIBLE)
        elif status is Status.OPTIMAL:
            status = Status.INFEASIBLE
            dual = math.inf
        return MipResult(inc, float(dual), nodes, status, elapsed, self.branch_log)


def solve_mip(model, limits: Optional[SolveLimits] = None, heuristic=None) -> MipResult:
    """Minimize a ``MipModel`` (or ``LpProblem``) whose integer variables are binary.

    ``dual_bound`` is a valid lower bound whatever the termination cause.
    ``heuristic`` optionally maps an LP point (column vector) to binary fixings
    ``{column: 0.0 | 1.0}`` that are tried as a primal solution.
    """
    if isinstance(model, MipModel):
        for v in model.variables:
            if v.is_binary and (v.lo < 0 or v.hi > 1):
                raise ConfigError(f"integer variable {v.name} is not binary")
    return _Search(model, limits or SolveLimits(), heuristic).run()
