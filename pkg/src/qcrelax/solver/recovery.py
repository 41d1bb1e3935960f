"""Local polish of a relaxation point into a (hopefully) feasible MIQCQP point."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from ..model import MiqcqpInstance, Solution

FEASIBLE_TOL = 1e-6
SWEEPS = 20
RHO0 = 10.0


@dataclass
class RecoveryResult:
    x: np.ndarray
    y: np.ndarray
    objective: float
    max_violation: float

    @property
    def feasible(self) -> bool:
        return self.max_violation <= FEASIBLE_TOL

    @property
    def point(self):
        return self.x, self.y


def _start_point(inst: MiqcqpInstance, relax_sol, relaxation):
    if relaxation is not None:
        return relaxation.original_point(relax_sol)
    if isinstance(relax_sol, tuple):
        x, y = relax_sol
        return np.asarray(x, float), np.zeros(inst.k) if y is None else np.asarray(y, float)
    vals = relax_sol.values if isinstance(relax_sol, Solution) else relax_sol
    x = np.array([vals[f"x{i}"] for i in range(inst.n)], dtype=float)
    y = np.array([vals[f"y{l}"] for l in range(inst.k)], dtype=float)
    return x, y


def primal_recovery(inst: MiqcqpInstance, relax_sol, relaxation=None) -> RecoveryResult:
    """Round the binaries, then run projected coordinate descent on a quadratic penalty.

    ``relax_sol`` is a ``Solution``/dict keyed ``x0.., y0..`` in original
    coordinates, an ``(x, y)`` pair, or, when ``relaxation`` (a
    ``RelaxationResult``) is given, a solution of that relaxation's model.
    The penalty weight starts at 10 and doubles after every sweep.  The best
    feasible point wins; failing that, the least violated one.
    """
    x, y = _start_point(inst, relax_sol, relaxation)
    y = np.round(np.clip(y, 0.0, 1.0))
    lo, hi = inst.lo, inst.hi
    x = np.clip(x, lo, hi)

    def merit(z, rho):
        g = inst.constraint_values(z, y) if inst.constraints else np.zeros(0)
        return inst.objective(z, y) + rho * float(np.sum(np.maximum(g, 0.0) ** 2))

    def score(z):
        return inst.objective(z, y), inst.max_violation(z, y)

    best_x = x.copy()
    best_obj, best_viol = score(x)
    rho = RHO0
    for _ in range(SWEEPS):
        for i in range(inst.n):
            if hi[i] <= lo[i]:
                continue
            trial = x.copy()

            def along(t):
                trial[i] = t
                return merit(trial, rho)

            cand = [x[i], lo[i], hi[i]]
            res = minimize_scalar(along, bounds=(lo[i], hi[i]), method="bounded",
                                  options={"xatol": 1e-10 * max(1.0, hi[i] - lo[i])})
            cand.append(float(res.x))
            vals = [along(t) for t in cand]
            x[i] = cand[int(np.argmin(vals))]
        obj, viol = score(x)
        better = (viol <= FEASIBLE_TOL and (best_viol > FEASIBLE_TOL or obj < best_obj)) or \
                 (viol > FEASIBLE_TOL and best_viol > FEASIBLE_TOL and viol < best_viol)
        if better:
            best_x, best_obj, best_viol = x.copy(), obj, viol
        rho *= 2.0
    return RecoveryResult(best_x, y, float(best_obj), float(best_viol))
