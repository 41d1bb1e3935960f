"""CSV schemas and writers for benchmark runs, error reports and profiles.

``RUN_FIELDS``      one row per (instance, method, L) solve
``ERROR_FIELDS``    one row per ``ErrorReport``
``PROFILE_FIELDS``  performance-profile step data, one row per (method, tau)
``SGM_FIELDS``      shifted geometric mean of wall time per method
"""
from __future__ import annotations

import csv
import math
import threading
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Sequence

RUN_FIELDS = ("instance", "method", "L", "L1", "status", "dual_bound", "primal", "gap", "nodes", "wall_time")
ERROR_FIELDS = ("method", "L", "L1", "lam", "univariate", "max_error_theory", "max_error_empirical",
                "avg_width_theory", "avg_width_empirical", "avg_width_stderr")
PROFILE_FIELDS = ("method", "tau", "fraction")
SGM_FIELDS = ("method", "instances", "shifted_geomean_time", "shift")


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        if math.isnan(v):
            return ""
        return repr(v)
    return v


class CsvSink:
    """Appends rows to a CSV file, flushing after each row; safe to share between threads."""

    def __init__(self, path, fields: Sequence[str], append: bool = False):
        self.path = Path(path)
        self.fields = tuple(fields)
        exists = append and self.path.exists() and self.path.stat().st_size > 0
        self._fh = open(self.path, "a" if append else "w", newline="")
        self._writer = csv.DictWriter(self._fh, self.fields, extrasaction="raise")
        self._lock = threading.Lock()
        if not exists:
            self._writer.writeheader()
            self._fh.flush()

    def write(self, row: Mapping) -> None:
        extra = set(row) - set(self.fields)
        if extra:
            raise ValueError(f"columns outside the schema: {', '.join(sorted(extra))}")
        with self._lock:
            self._writer.writerow({k: _cell(row.get(k)) for k in self.fields})
            self._fh.flush()

    def close(self) -> None:
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def write_rows(path, fields: Sequence[str], rows: Iterable[Mapping]) -> None:
    with CsvSink(path, fields) as sink:
        for r in rows:
            sink.write(r)


def read_rows(path) -> List[Dict[str, str]]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def to_float(s: str) -> float:
    return float(s) if s not in ("", None) else math.nan
