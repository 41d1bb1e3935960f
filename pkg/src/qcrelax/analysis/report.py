"""One-row summaries of a method's error behaviour."""
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional

from ..model import RelaxConfig
from .error import (SER, avg_width_empirical, avg_width_theoretical, max_error_empirical,
                    max_error_theoretical, parse_method)


@dataclass
class ErrorReport:
    method: str
    L: int
    L1: Optional[int]
    lam: float
    univariate: bool
    max_error_theory: Optional[float]
    max_error_empirical: float
    avg_width_theory: Optional[float]
    avg_width_empirical: float
    avg_width_stderr: float

    FIELDS = ("method", "L", "L1", "lam", "univariate", "max_error_theory", "max_error_empirical",
              "avg_width_theory", "avg_width_empirical", "avg_width_stderr")

    def as_row(self) -> dict:
        return {k: v for k, v in asdict(self).items()}


def error_report(method, L: int, L1: Optional[int] = None, lam: float = 0.5, univariate: bool = False,
                 samples: int = 1_000_000, seed: int = 42, resolution: int = 100_000) -> ErrorReport:
    m = parse_method(method)
    if m == SER:
        name, l1 = SER, None
    else:
        cfg = RelaxConfig(m, L, L1, lam)
        name, l1 = m.value, cfg.L1 if m.tightened else None
    avg, se = (float("nan"), float("nan")) if m == SER else \
        avg_width_empirical(m, L, samples, seed, univariate, l1)
    return ErrorReport(
        method=name, L=L, L1=l1, lam=lam, univariate=univariate,
        max_error_theory=max_error_theoretical(m, L, univariate),
        max_error_empirical=max_error_empirical(m, L, resolution, univariate, l1),
        avg_width_theory=None if m == SER else avg_width_theoretical(m, L, univariate),
        avg_width_empirical=avg, avg_width_stderr=se)
