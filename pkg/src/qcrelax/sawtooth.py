"""Sawtooth machinery for ``y = x^2`` on ``[0, 1]``.

``G(x) = min(2x, 2(1-x))`` is the tooth map and ``F^L(x) = x - sum_j 4^-j G^j(x)``
interpolates ``x^2`` at every multiple of ``2^-L``.  The builders emit the
mixed-binary set (``S^L``), its alpha-free LP projection (``T^L``) and the
epigraph relaxation ``Q^L`` used to tighten lower bounds on squares.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, MutableMapping

import numpy as np

from .errors import DomainError
from .model import LinearFragment, binary, continuous, row

_DOMAIN_TOL = 1e-12


def _check_unit(x):
    x = np.asarray(x, dtype=float)
    if np.any(x < -_DOMAIN_TOL) or np.any(x > 1.0 + _DOMAIN_TOL):
        raise DomainError("sawtooth functions are defined on [0, 1] only")
    return np.clip(x, 0.0, 1.0)


def tooth_iterate(x, j: int):
    """``G^j(x)``; ``G^0`` is the identity.  Accepts scalars or arrays."""
    if j < 0:
        raise DomainError("iterate depth must be non-negative")
    g = _check_unit(x)
    for _ in range(j):
        g = np.minimum(2.0 * g, 2.0 * (1.0 - g))
    return float(g) if g.ndim == 0 else g


def sawtooth_value(x, L: int):
    """``F^L(x)``, the piecewise-linear interpolant of ``x^2`` on a ``2^-L`` grid."""
    g = _check_unit(x)
    val = g.copy()
    for j in range(1, L + 1):
        g = np.minimum(2.0 * g, 2.0 * (1.0 - g))
        val = val - 4.0 ** (-j) * g
    return float(val) if val.ndim == 0 else val


@dataclass
class SawtoothFragment(LinearFragment):
    x: str = ""
    g: List[str] = field(default_factory=list)
    alpha: List[str] = field(default_factory=list)

    def complete(self, values: MutableMapping[str, float]) -> None:
        """Fill ``g`` (and ``alpha``) with the exact sawtooth values of ``x``."""
        gj = min(max(values[self.x], 0.0), 1.0)
        values[self.g[0]] = gj
        for j in range(1, len(self.g)):
            if self.alpha:
                values[self.alpha[j - 1]] = 1.0 if gj > 0.5 else 0.0
            gj = min(2.0 * gj, 2.0 * (1.0 - gj))
            values[self.g[j]] = gj


def _g_vars(prefix: str, L: int):
    return [continuous(f"{prefix}g{j}", 0.0, 1.0) for j in range(L + 1)]


def build_sawtooth_mip(x: str, L: int, prefix: str = "") -> SawtoothFragment:
    """Mixed-binary set forcing ``g_j = G^j(x)`` once every ``alpha_j`` is integral."""
    prefix = prefix or f"saw_{x}_"
    gv = _g_vars(prefix, L)
    av = [binary(f"{prefix}a{j}") for j in range(1, L + 1)]
    g = [v.name for v in gv]
    a = [v.name for v in av]
    rows = [row({g[0]: 1.0, x: -1.0}, "==", 0.0, "saw_link")]
    for j in range(1, L + 1):
        gp, gj, aj = g[j - 1], g[j], a[j - 1]
        rows += [
            row({gj: 1.0, gp: -2.0, aj: 2.0}, ">=", 0.0),   # g_j >= 2(g_{j-1} - a_j)
            row({gj: 1.0, gp: -2.0}, "<=", 0.0),            # g_j <= 2 g_{j-1}
            row({gj: 1.0, aj: -2.0, gp: 2.0}, ">=", 0.0),   # g_j >= 2(a_j - g_{j-1})
            row({gj: 1.0, gp: 2.0}, "<=", 2.0),             # g_j <= 2(1 - g_{j-1})
        ]
    return SawtoothFragment(gv + av, rows, x=x, g=g, alpha=a)


def build_sawtooth_lp(x: str, L: int, prefix: str = "") -> SawtoothFragment:
    """``T^L``: the projection of the LP relaxation of ``S^L`` onto ``(x, g)``."""
    prefix = prefix or f"saw_{x}_"
    gv = _g_vars(prefix, L)
    g = [v.name for v in gv]
    rows = [row({g[0]: 1.0, x: -1.0}, "==", 0.0, "saw_link")]
    for j in range(1, L + 1):
        rows += [
            row({g[j]: 1.0, g[j - 1]: 2.0}, "<=", 2.0),
            row({g[j]: 1.0, g[j - 1]: -2.0}, "<=", 0.0),
        ]
    return SawtoothFragment(gv, rows, x=x, g=g)


def epigraph_cuts(x: str, y: str, g: List[str], L: int) -> LinearFragment:
    """Rows ``y >= F^j(x, g) - 2^(-2j-2)`` for ``j = 0..L`` plus ``y >= 0``, ``y >= 2x - 1``."""
    if len(g) < L + 1:
        raise ValueError(f"need {L + 1} sawtooth variables, got {len(g)}")
    rows = []
    for j in range(L + 1):
        coefs: Dict[str, float] = {y: 1.0, x: -1.0}
        for i in range(1, j + 1):
            coefs[g[i]] = 4.0 ** (-i)
        rows.append(row(coefs, ">=", -(2.0 ** (-2 * j - 2)), f"ser{j}"))
    rows.append(row({y: 1.0}, ">=", 0.0, "ser_tan0"))
    rows.append(row({y: 1.0, x: -2.0}, ">=", -1.0, "ser_tan1"))
    return LinearFragment([], rows)


def build_epigraph_relaxation(x: str, y: str, L: int, prefix: str = "",
                              lp: SawtoothFragment = None) -> SawtoothFragment:
    """``Q^L`` as an extended LP fragment.

    If ``lp`` is given, its ``g`` variables are reused and not redeclared.
    """
    if lp is None:
        lp = build_sawtooth_lp(x, L, prefix)
        frag = SawtoothFragment(list(lp.new_vars), list(lp.rows), x=x, g=list(lp.g))
    else:
        frag = SawtoothFragment([], [], x=x, g=list(lp.g))
    frag.extend(epigraph_cuts(x, y, frag.g, L))
    return frag
