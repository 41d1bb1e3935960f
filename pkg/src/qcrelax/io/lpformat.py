"""Export of ``MipModel`` in the CPLEX LP text format."""
from __future__ import annotations

import math
from pathlib import Path
from typing import Iterable, List, Mapping, Tuple

from ..errors import QcRelaxError
from ..model import MipModel


class IoError(QcRelaxError, OSError):
    """Model export failed."""


def _num(v: float) -> str:
    return format(float(v), ".17g")


def _terms(coefs: Iterable[Tuple[str, float]]) -> str:
    parts: List[str] = []
    for name, a in coefs:
        if a == 0.0:
            continue
        sign = "-" if a < 0 else "+"
        parts.append(f"{sign} {_num(abs(a))} {name}")
    if not parts:
        return "0"
    s = " ".join(parts)
    return s[2:] if s.startswith("+ ") else s


def _wrap(prefix: str, body: str, width: int = 250) -> str:
    """Break long expressions on term boundaries; the format caps line length."""
    words = body.split(" ")
    lines, cur = [], prefix
    for w in words:
        if len(cur) + len(w) + 1 > width and cur.strip():
            lines.append(cur)
            cur = "   "
        cur += (" " if not cur.endswith(" ") else "") + w
    lines.append(cur)
    return "\n".join(lines)


def format_lp(model: MipModel) -> str:
    """Objective, ``Subject To``, ``Bounds`` and ``Binaries`` sections with 17 significant digits."""
    out = [f"\\ {model.name or 'model'}", "Minimize"]
    obj = _terms(model.objective.items())
    c = model.constant
    if c:
        obj = _num(c) if obj == "0" else f"{obj} {'+' if c > 0 else '-'} {_num(abs(c))}"
    out.append(_wrap(" obj: ", obj))
    out.append("Subject To")
    op = {"<=": "<=", ">=": ">=", "==": "="}
    for i, r in enumerate(model.rows):
        name = f"{r.name}_{i}" if r.name else f"c{i}"
        out.append(_wrap(f" {name}: ", f"{_terms(r.coefs.items())} {op[r.sense]} {_num(r.rhs)}"))
    out.append("Bounds")
    for v in model.variables:
        if v.is_binary:
            continue
        lo, hi = v.lo, v.hi
        if lo == hi:
            out.append(f" {v.name} = {_num(lo)}")
        elif math.isinf(lo) and math.isinf(hi):
            out.append(f" {v.name} free")
        else:
            slo = "-inf" if math.isinf(lo) else _num(lo)
            shi = "+inf" if math.isinf(hi) else _num(hi)
            out.append(f" {slo} <= {v.name} <= {shi}")
    bins = model.binaries
    if bins:
        out.append("Binaries")
        out.extend(f" {b}" for b in bins)
    out.append("End")
    return "\n".join(out) + "\n"


def export_lp_file(model: MipModel, path) -> None:
    try:
        Path(path).write_text(format_lp(model))
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc
