"""Dense bounded-variable simplex kernels (numba-compiled).

The tableau ``T`` has ``m + 1`` rows: rows ``0..m-1`` hold ``B^-1 A`` for the
homogeneous system ``A x = 0`` (logicals and artificials included as columns)
and row ``m`` holds the reduced costs.  ``x`` carries the value of every
column, basic or not; ``pos[j]`` is the basis row of column ``j`` or ``-1``.
"""
import numpy as np
from numba import njit

OPTIMAL = 0
UNBOUNDED = 1
INFEASIBLE = 1
ITER_LIMIT = 2

_DEGEN_STEP = 1e-12


@njit(cache=True)
def pivot(T, r, j):
    rows, cols = T.shape
    p = T[r, j]
    for k in range(cols):
        T[r, k] /= p
    T[r, j] = 1.0
    for i in range(rows):
        if i == r:
            continue
        f = T[i, j]
        if f != 0.0:
            for k in range(cols):
                T[i, k] -= f * T[r, k]
            T[i, j] = 0.0


@njit(cache=True)
def refresh_basic(T, x, basis, pos):
    """Recompute basic values from nonbasic ones: ``x_B = -T_N x_N``."""
    m = basis.shape[0]
    cols = T.shape[1]
    for i in range(m):
        s = 0.0
        for k in range(cols):
            if pos[k] < 0 and x[k] != 0.0:
                s += T[i, k] * x[k]
        x[basis[i]] = -s


@njit(cache=True)
def primal(T, x, basis, pos, lb, ub, max_iter, piv_tol, opt_tol, bland_after):
    """Bounded primal simplex from a primal-feasible basis.

    Dantzig pricing; switches to Bland's rule after ``bland_after``
    consecutive degenerate steps.  Returns ``(status, iterations)``.
    """
    m = basis.shape[0]
    cols = T.shape[1]
    degenerate = 0
    bland = False
    it = 0
    while it < max_iter:
        jin = -1
        dirn = 0
        best = 0.0
        for j in range(cols):
            if pos[j] >= 0 or lb[j] == ub[j]:
                continue
            d = T[m, j]
            if d < -opt_tol and x[j] < ub[j]:
                score = -d
                s = 1
            elif d > opt_tol and x[j] > lb[j]:
                score = d
                s = -1
            else:
                continue
            if bland:
                jin = j
                dirn = s
                break
            if score > best:
                best = score
                jin = j
                dirn = s
        if jin < 0:
            return OPTIMAL, it

        # ratio test
        tmax = ub[jin] - lb[jin]
        tmin = np.inf
        for i in range(m):
            a = dirn * T[i, jin]
            b = basis[i]
            if a > piv_tol:
                if lb[b] > -np.inf:
                    t = (x[b] - lb[b]) / a
                    if t < tmin:
                        tmin = t
            elif a < -piv_tol:
                if ub[b] < np.inf:
                    t = (ub[b] - x[b]) / (-a)
                    if t < tmin:
                        tmin = t
        if tmin < 0.0:
            tmin = 0.0
        r = -1
        if tmin < tmax:
            # among near-ties prefer the largest pivot (or lowest index under Bland)
            bestpiv = 0.0
            bestidx = cols + 1
            lim = tmin + 1e-12
            for i in range(m):
                a = dirn * T[i, jin]
                b = basis[i]
                t = np.inf
                if a > piv_tol and lb[b] > -np.inf:
                    t = (x[b] - lb[b]) / a
                elif a < -piv_tol and ub[b] < np.inf:
                    t = (ub[b] - x[b]) / (-a)
                if t <= lim:
                    if bland:
                        if b < bestidx:
                            bestidx = b
                            r = i
                    elif abs(a) > bestpiv:
                        bestpiv = abs(a)
                        r = i
            step = tmin
        else:
            step = tmax
        if step == np.inf:
            return UNBOUNDED, it

        if step > 0.0:
            x[jin] += dirn * step
            for i in range(m):
                a = T[i, jin]
                if a != 0.0:
                    x[basis[i]] -= dirn * step * a
        if r >= 0:
            lv = basis[r]
            a = dirn * T[r, jin]
            x[lv] = lb[lv] if a > 0.0 else ub[lv]
            pivot(T, r, jin)
            basis[r] = jin
            pos[jin] = r
            pos[lv] = -1
        else:
            x[jin] = ub[jin] if dirn > 0 else lb[jin]

        if step <= _DEGEN_STEP:
            degenerate += 1
            if degenerate >= bland_after:
                bland = True
        else:
            degenerate = 0
        it += 1
        if it % 200 == 0:
            refresh_basic(T, x, basis, pos)
    return ITER_LIMIT, it


@njit(cache=True)
def dual(T, x, basis, pos, lb, ub, max_iter, piv_tol, feas_tol):
    """Bounded dual simplex from a dual-feasible basis.

    Returns ``(status, iterations)`` with status ``OPTIMAL`` once the basis is
    primal feasible and ``INFEASIBLE`` when a leaving row admits no entering column.
    """
    m = basis.shape[0]
    cols = T.shape[1]
    it = 0
    while it < max_iter:
        r = -1
        worst = feas_tol
        target = 0.0
        for i in range(m):
            b = basis[i]
            if x[b] < lb[b] - worst:
                worst = lb[b] - x[b]
                r = i
                target = lb[b]
            elif x[b] > ub[b] + worst:
                worst = x[b] - ub[b]
                r = i
                target = ub[b]
        if r < 0:
            return OPTIMAL, it
        lv = basis[r]
        need_up = target > x[lv]
        jin = -1
        best = np.inf
        bestpiv = 0.0
        for j in range(cols):
            if pos[j] >= 0 or lb[j] == ub[j]:
                continue
            a = T[r, j]
            if abs(a) <= piv_tol:
                continue
            can_up = x[j] < ub[j]
            can_down = x[j] > lb[j]
            # basic value moves by -a * dx_j
            if need_up:
                ok = (can_up and a < 0.0) or (can_down and a > 0.0)
            else:
                ok = (can_up and a > 0.0) or (can_down and a < 0.0)
            if not ok:
                continue
            ratio = abs(T[m, j]) / abs(a)
            if ratio < best - 1e-12 or (ratio <= best + 1e-12 and abs(a) > bestpiv):
                best = ratio
                bestpiv = abs(a)
                jin = j
        if jin < 0:
            return INFEASIBLE, it
        a = T[r, jin]
        dx = (x[lv] - target) / a
        x[jin] += dx
        for i in range(m):
            f = T[i, jin]
            if f != 0.0:
                x[basis[i]] -= f * dx
        x[lv] = target
        pivot(T, r, jin)
        basis[r] = jin
        pos[jin] = r
        pos[lv] = -1
        it += 1
        if it % 200 == 0:
            refresh_basic(T, x, basis, pos)
    return ITER_LIMIT, it
