"""LP relaxations of ``MipModel`` solved by a bounded-variable primal simplex.

``LpProblem`` is the dense array form ``min c'x + c0`` subject to
``row_lo <= A x <= row_hi`` and ``lb <= x <= ub``.  ``SimplexState`` owns one
tableau and supports cheap re-optimization after bound or objective changes
(dual simplex restores feasibility after a bound change), which is what the
fixed-x probes and branch-and-bound rely on.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ..errors import NumericalFailure
from ..model import MipModel, Solution, Status
from . import _kernels as K

PIVOT_TOL = 1e-9
OPT_TOL = 1e-9
FEAS_TOL = 1e-7
BLAND_AFTER = 1000


@dataclass(frozen=True, eq=False)
class LpProblem:
    A: np.ndarray
    row_lo: np.ndarray
    row_hi: np.ndarray
    c: np.ndarray
    lb: np.ndarray
    ub: np.ndarray
    c0: float = 0.0
    names: Optional[Sequence[str]] = None
    integer: Optional[np.ndarray] = None

    @property
    def n(self) -> int:
        return self.A.shape[1]

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @classmethod
    def from_model(cls, model: MipModel) -> "LpProblem":
        idx = model.index
        n, m = model.n_vars, model.n_rows
        A = np.zeros((m, n))
        lo = np.full(m, -np.inf)
        hi = np.full(m, np.inf)
        for i, r in enumerate(model.rows):
            for name, a in r.coefs.items():
                A[i, idx[name]] += a
            if r.sense in ("<=", "=="):
                hi[i] = r.rhs
            if r.sense in (">=", "=="):
                lo[i] = r.rhs
        c = np.zeros(n)
        for name, a in model.objective.items():
            c[idx[name]] += a
        lb = np.array([v.lo for v in model.variables], dtype=float)
        ub = np.array([v.hi for v in model.variables], dtype=float)
        integer = np.array([v.is_binary for v in model.variables], dtype=bool)
        return cls(A, lo, hi, c, lb, ub, model.constant,
                   [v.name for v in model.variables], integer)


@dataclass
class Basis:
    """Enough to rebuild a tableau: basic columns, nonbasic-at-upper flags, artificial signs."""

    basis: np.ndarray
    at_upper: np.ndarray
    sigma: np.ndarray


class SimplexState:
    """One mutable simplex tableau for an ``LpProblem``.

    Typical use::

        st = SimplexState(prob)
        st.solve()
        st.set_bounds([j], [v], [v]); st.solve()     # warm re-solve
    """

    def __init__(self, prob: LpProblem, lb=None, ub=None, c=None,
                 max_iter: int = 50_000, bland_after: int = BLAND_AFTER):
        self.prob = prob
        n, m = prob.n, prob.m
        self.n, self.m = n, m
        self.lb = np.concatenate([prob.lb if lb is None else np.asarray(lb, float), prob.row_lo, np.zeros(m)])
        self.ub = np.concatenate([prob.ub if ub is None else np.asarray(ub, float), prob.row_hi, np.zeros(m)])
        self.cost = np.zeros(n + 2 * m)
        self.cost[:n] = prob.c if c is None else np.asarray(c, float)
        self.max_iter = max_iter
        self.bland_after = bland_after
        self.T = None
        self.status: Optional[Status] = None
        self.iterations = 0

    # -- construction -------------------------------------------------------

    def _full_matrix(self, sigma):
        n, m = self.n, self.m
        Af = np.zeros((m, n + 2 * m))
        Af[:, :n] = self.prob.A
        Af[:, n:n + m] = -np.eye(m)
        Af[:, n + m:] = np.diag(sigma)
        return Af

    def _initial_nonbasic(self, at_upper=None):
        lb, ub = self.lb, self.ub
        x = np.where(np.isfinite(lb), lb, np.where(np.isfinite(ub), ub, 0.0))
        if at_upper is not None:
            x = np.where(at_upper & np.isfinite(ub), ub, x)
        return x

    def _cold_start(self):
        n, m = self.n, self.m
        N = n + 2 * m
        x = self._initial_nonbasic()
        x[n:] = 0.0
        act = self.prob.A @ x[:n]
        rlo, rhi = self.lb[n:n + m], self.ub[n:n + m]
        need = (act < rlo - FEAS_TOL) | (act > rhi + FEAS_TOL)
        target = np.where(act < rlo, rlo, np.where(act > rhi, rhi, act))
        sigma = np.where(target - act >= 0.0, 1.0, -1.0)
        self.sigma = sigma
        Af = self._full_matrix(sigma)
        self.Af = Af
        basis = np.where(need, n + m + np.arange(m), n + np.arange(m)).astype(np.int64)
        diag = np.where(need, sigma, -1.0)
        T = np.zeros((m + 1, N))
        T[:m] = Af / diag[:, None]
        x[n:n + m] = np.where(need, target, act)
        x[n + m:] = np.where(need, np.abs(target - act), 0.0)
        self.lb[n + m:] = 0.0
        self.ub[n + m:] = np.where(need, np.inf, 0.0)
        pos = np.full(N, -1, dtype=np.int64)
        pos[basis] = np.arange(m)
        self.T, self.x, self.basis, self.pos = T, x, basis, pos
        if need.any():
            c1 = np.zeros(N)
            c1[n + m:] = need.astype(float)
            self._set_reduced_costs(c1)
            st, it = K.primal(T, x, basis, pos, self.lb, self.ub, self.max_iter,
                              PIVOT_TOL, OPT_TOL, self.bland_after)
            self.iterations += it
            if st == K.ITER_LIMIT:
                raise NumericalFailure("phase I hit the iteration cap")
            K.refresh_basic(T, x, basis, pos)
            infeas = float(np.sum(x[n + m:]))
            self.ub[n + m:] = 0.0
            if infeas > FEAS_TOL * max(1.0, m):
                return False
            x[n + m:] = np.clip(x[n + m:], 0.0, 0.0)
            self._drive_out_artificials()
        return True

    def _drive_out_artificials(self):
        n, m = self.n, self.m
        T = self.T
        for r in range(m):
            b = self.basis[r]
            if b < n + m:
                continue
            row = np.abs(T[r, :n + m])
            row[self.pos[:n + m] >= 0] = 0.0
            j = int(np.argmax(row))
            if row[j] > 1e-7:
                K.pivot(T, r, j)
                self.pos[b] = -1
                self.basis[r] = j
                self.pos[j] = r
        K.refresh_basic(T, self.x, self.basis, self.pos)

    def _set_reduced_costs(self, cost):
        m = self.m
        self.T[m] = cost - cost[self.basis] @ self.T[:m]

    # -- public API ---------------------------------------------------------

    def set_bounds(self, idx, lo, hi):
        """Change bounds of structural columns in place, keeping the basis."""
        idx = np.atleast_1d(np.asarray(idx, dtype=np.int64))
        lo = np.broadcast_to(np.asarray(lo, float), idx.shape)
        hi = np.broadcast_to(np.asarray(hi, float), idx.shape)
        if self.T is None:
            self.lb[idx] = lo
            self.ub[idx] = hi
            return
        m = self.m
        for j, l, h in zip(idx, lo, hi):
            old = self.x[j]
            was_upper = self.ub[j] > self.lb[j] and old == self.ub[j]
            self.lb[j], self.ub[j] = l, h
            if self.pos[j] < 0:
                # park at the bound that keeps the reduced cost dual feasible
                d = self.T[m, j]
                if d > OPT_TOL and np.isfinite(l):
                    new = l
                elif d < -OPT_TOL and np.isfinite(h):
                    new = h
                elif was_upper and np.isfinite(h):
                    new = h
                elif np.isfinite(l):
                    new = l
                elif np.isfinite(h):
                    new = h
                else:
                    new = 0.0
                delta = new - old
                if delta != 0.0:
                    self.x[j] = new
                    col = self.T[:m, j]
                    self.x[self.basis] -= col * delta

    def set_objective(self, c):
        self.cost[:self.n] = np.asarray(c, float)
        if self.T is not None:
            self._set_reduced_costs(self.cost)

    def basis_snapshot(self) -> Basis:
        at_upper = (self.pos < 0) & (self.x == self.ub) & (self.ub > self.lb)
        return Basis(self.basis.copy(), at_upper, self.sigma.copy())

    def restore(self, snap: Basis) -> bool:
        """Refactor the tableau for a stored basis under the current bounds."""
        n, m = self.n, self.m
        self.sigma = snap.sigma.copy()
        self.Af = self._full_matrix(self.sigma)
        B = self.Af[:, snap.basis]
        try:
            Tm = np.linalg.solve(B, self.Af)
        except np.linalg.LinAlgError:
            return False
        if not np.all(np.isfinite(Tm)):
            return False
        self.T = np.zeros((m + 1, n + 2 * m))
        self.T[:m] = Tm
        self.basis = snap.basis.astype(np.int64).copy()
        self.pos = np.full(n + 2 * m, -1, dtype=np.int64)
        self.pos[self.basis] = np.arange(m)
        self.lb[n + m:] = 0.0
        self.ub[n + m:] = 0.0
        x = self._initial_nonbasic(snap.at_upper)
        x[n + m:] = 0.0
        self.x = x
        K.refresh_basic(self.T, self.x, self.basis, self.pos)
        self._set_reduced_costs(self.cost)
        return True

    def _primal_feasible(self, tol=FEAS_TOL):
        xb = self.x[self.basis]
        return bool(np.all(xb >= self.lb[self.basis] - tol) and np.all(xb <= self.ub[self.basis] + tol))

    def _dual_feasible(self, tol=1e-7):
        d = self.T[self.m]
        nb = (self.pos < 0) & (self.ub > self.lb)
        at_lo = nb & (self.x <= self.lb)
        at_hi = nb & (self.x >= self.ub)
        free = nb & ~at_lo & ~at_hi
        return not (np.any(d[at_lo] < -tol) or np.any(d[at_hi] > tol) or np.any(np.abs(d[free]) > tol))

    def solve(self) -> Status:
        """(Re-)optimize; warm when a tableau exists, cold otherwise."""
        if self.T is not None:
            status = self._warm()
            if status is not None:
                self.status = status
                return status
        self.T = None
        self.lb[self.n + self.m:] = 0.0
        self.ub[self.n + self.m:] = 0.0
        if not self._cold_start():
            # the tableau still carries phase-I costs; never warm-start from it
            self.T = None
            self.status = Status.INFEASIBLE
            return self.status
        self._set_reduced_costs(self.cost)
        self.status = self._run_primal()
        return self.status

    def _warm(self) -> Optional[Status]:
        if not self._primal_feasible():
            if not self._dual_feasible():
                return None
            st, it = K.dual(self.T, self.x, self.basis, self.pos, self.lb, self.ub,
                            self.max_iter, PIVOT_TOL, FEAS_TOL)
            self.iterations += it
            if st == K.INFEASIBLE:
                return Status.INFEASIBLE
            if st == K.ITER_LIMIT:
                return None
            K.refresh_basic(self.T, self.x, self.basis, self.pos)
            if not self._primal_feasible():
                return None
        return self._run_primal()

    def _run_primal(self) -> Status:
        st, it = K.primal(self.T, self.x, self.basis, self.pos, self.lb, self.ub,
                          self.max_iter, PIVOT_TOL, OPT_TOL, self.bland_after)
        self.iterations += it
        if st == K.ITER_LIMIT:
            raise NumericalFailure("simplex hit the iteration cap")
        K.refresh_basic(self.T, self.x, self.basis, self.pos)
        if st == K.UNBOUNDED:
            return Status.UNBOUNDED
        return Status.OPTIMAL

    @property
    def values(self) -> np.ndarray:
        return self.x[:self.n].copy()

    @property
    def objective(self) -> float:
        return float(self.cost[:self.n] @ self.x[:self.n] + self.prob.c0)


def solve_lp(model, lb=None, ub=None) -> Solution:
    """Solve the LP relaxation of ``model`` (binaries relaxed to ``[0, 1]``).

    ``model`` may be a ``MipModel`` or an ``LpProblem``; ``lb``/``ub`` override
    variable bounds.  Raises ``NumericalFailure`` if pivoting stalls.
    """
    prob = model if isinstance(model, LpProblem) else LpProblem.from_model(model)
    st = SimplexState(prob, lb, ub)
    status = st.solve()
    names = prob.names or [f"x{i}" for i in range(prob.n)]
    if status is Status.OPTIMAL:
        vals = st.values
        return Solution(dict(zip(names, vals.tolist())), st.objective, status)
    obj = np.inf if status is Status.INFEASIBLE else -np.inf
    return Solution({}, obj, status)
