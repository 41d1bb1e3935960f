"""JSON round trip for ``MipModel`` (infinite bounds are written as ``null``)."""
from __future__ import annotations

import json
import math
from pathlib import Path

from ..errors import ParseError
from ..model import MipModel, Row, Variable, VarKind


def _b(v):
    return None if math.isinf(v) else v


def model_to_document(model: MipModel) -> dict:
    return {
        "name": model.name,
        "variables": [[v.name, v.kind.value, _b(v.lo), _b(v.hi)] for v in model.variables],
        "rows": [[r.name, r.sense, r.rhs, dict(r.coefs)] for r in model.rows],
        "objective": dict(model.objective),
        "constant": model.constant,
    }


def dumps_model(model: MipModel) -> str:
    return json.dumps(model_to_document(model))


def loads_model(text: str) -> MipModel:
    try:
        doc = json.loads(text)
        variables = tuple(Variable(n, VarKind(k), -math.inf if lo is None else float(lo),
                                   math.inf if hi is None else float(hi))
                          for n, k, lo, hi in doc["variables"])
        rows = tuple(Row({v: float(a) for v, a in coefs.items()}, sense, float(rhs), name)
                     for name, sense, rhs, coefs in doc["rows"])
        model = MipModel(variables, rows, {v: float(a) for v, a in doc["objective"].items()},
                         float(doc.get("constant", 0.0)), doc.get("name", ""))
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed model document: {exc}") from None
    model.validate()
    return model


def write_model(model: MipModel, path) -> None:
    Path(path).write_text(dumps_model(model))


def read_model(path) -> MipModel:
    return loads_model(Path(path).read_text())
