"""Breakpoint objective, performance profiles and shifted geometric means."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..errors import DomainError


def breakpoint_objective(lx: Sequence[float], ly: Sequence[float]) -> float:
    """Average McCormick width ``(sum lx^2)(sum ly^2) / 6`` of a rectangular partition of the unit square."""
    lx = np.asarray(lx, float)
    ly = np.asarray(ly, float)
    for name, v in (("lx", lx), ("ly", ly)):
        if v.size == 0 or np.any(v < 0):
            raise DomainError(f"{name} must be a non-empty vector of non-negative lengths")
        if abs(v.sum() - 1.0) > 1e-9:
            raise DomainError(f"{name} sums to {v.sum():.12g}, expected 1")
    return float(np.sum(lx * lx) * np.sum(ly * ly) / 6.0)


def shifted_geomean(values: Sequence[float], shift: float = 10.0) -> float:
    """``(prod(t_i + s))^(1/n) - s``; falls back to log space if the product overflows."""
    v = np.asarray(values, float)
    if v.size == 0:
        raise DomainError("shifted_geomean of an empty sequence")
    if np.any(v < 0):
        raise DomainError("values must be non-negative")
    if np.any(v + shift <= 0):
        raise DomainError("values + shift must be positive")
    prod = math.prod((v + shift).tolist())
    if math.isfinite(prod) and prod > 0.0:
        return float(prod ** (1.0 / v.size) - shift)
    return float(np.exp(np.mean(np.log(v + shift))) - shift)


@dataclass
class ProfileTable:
    """Per-instance bounds, ratios and cumulative step data per method.

    ``bounds[i, p]`` is method ``p`` on instance ``i`` after filling missing
    runs; ``ratios`` are >= 1 with 1 marking the best method.
    """

    methods: List[str]
    instances: List[str]
    bounds: np.ndarray
    ratios: np.ndarray
    orientation: str
    shifts: np.ndarray

    def steps(self, method: str) -> Tuple[np.ndarray, np.ndarray]:
        """Breakpoints ``tau`` and ``P(tau)`` right after each breakpoint."""
        r = np.sort(self.ratios[:, self.methods.index(method)])
        taus, counts = np.unique(r, return_counts=True)
        return taus, np.cumsum(counts) / len(r)

    def P(self, method: str, tau: float) -> float:
        """Fraction of instances with ratio at most ``tau``."""
        r = self.ratios[:, self.methods.index(method)]
        return float(np.mean(r <= tau * (1 + 1e-12)))

    def step_rows(self) -> List[Tuple[str, float, float]]:
        rows = []
        for m in self.methods:
            taus, ps = self.steps(m)
            rows.extend((m, float(t), float(p)) for t, p in zip(taus, ps))
        return rows


def performance_profile(bounds: Mapping[str, Mapping[str, Optional[float]]],
                        orientation: str = "max") -> ProfileTable:
    """Performance profile over ``bounds[method][instance]``.

    ``orientation="min"`` treats smaller values as better (``r = d / min d``),
    ``"max"`` treats larger as better (``r = max d / d``), which is the right
    reading for dual bounds of minimization problems.  A missing or non-finite
    value takes the worst value among methods on that instance; instances no
    method solved are dropped.  When an instance's smallest value is not
    positive, every value on it is shifted by ``1 - min`` first.
    """
    if orientation not in ("min", "max"):
        raise DomainError("orientation must be 'min' or 'max'")
    methods = list(bounds)
    instances = sorted({i for m in methods for i in bounds[m]})
    rows, kept = [], []
    for inst in instances:
        vals = np.array([_value(bounds[m].get(inst)) for m in methods])
        ok = np.isfinite(vals)
        if not ok.any():
            continue
        worst = vals[ok].min() if orientation == "max" else vals[ok].max()
        vals[~ok] = worst
        rows.append(vals)
        kept.append(inst)
    if not rows:
        raise DomainError("no instance has a finite value")
    B = np.array(rows)
    low = B.min(axis=1)
    shifts = np.where(low <= 0.0, 1.0 - low, 0.0)
    S = B + shifts[:, None]
    if orientation == "min":
        R = S / S.min(axis=1, keepdims=True)
    else:
        R = S.max(axis=1, keepdims=True) / S
    return ProfileTable(methods, kept, B, R, orientation, shifts)


def _value(v) -> float:
    if v is None:
        return math.nan
    v = float(v)
    return v if math.isfinite(v) else math.nan


def solved_subset(status: Mapping[str, Mapping[str, str]], optimal: str = "Optimal") -> List[str]:
    """Instances on which at least one method reached ``optimal`` status."""
    out = set()
    for per_inst in status.values():
        out.update(i for i, s in per_inst.items() if s == optimal)
    return sorted(out)
