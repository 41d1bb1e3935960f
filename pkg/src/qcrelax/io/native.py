"""Native JSON instance format.

Layout (quadratic triplets are 1-based ``[i, k, value]`` with ``i <= k``;
``value`` is the full coefficient of ``x_i x_k`` in ``x'Qx``)::

    {
      "name": "example",
      "n": 2, "k": 1,
      "bounds": [[-1, 1], [0, 2]],
      "objective": {"Q": [[1, 1, 1.0], [1, 2, -3.0]], "c": [0, 1], "d": [2], "constant": 0},
      "constraints": [{"Q": [[2, 2, 1.0]], "c": [0, 0], "d": [0], "b": -1}]
    }

``c``/``d`` default to zeros, ``constant``/``b`` to 0, ``constraints`` to ``[]``.
"""
from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any, Dict, List

import numpy as np

from ..errors import NonFiniteBounds, ParseError, ValidationError
from ..model import Interval, MiqcqpInstance, QuadConstraint, quadratic_terms


def _locate(text: str, key: str):
    """1-based (line, column) of the first ``"key"`` in ``text``, if present."""
    pos = text.find(f'"{key}"')
    if pos < 0:
        return None, None
    line = text.count("\n", 0, pos) + 1
    return line, pos - (text.rfind("\n", 0, pos) + 1) + 1


def _vector(obj, size: int, what: str, text: str) -> np.ndarray:
    if obj is None:
        return np.zeros(size)
    if not isinstance(obj, list) or len(obj) != size or \
            not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj):
        raise ParseError(f"'{what}' must be a list of {size} numbers", *_locate(text, what))
    return np.array(obj, dtype=float)


def _matrix(triplets, n: int, what: str, text: str) -> np.ndarray:
    Q = np.zeros((n, n))
    if triplets is None:
        return Q
    if not isinstance(triplets, list):
        raise ParseError(f"'{what}' must be a list of [i, k, value] triplets", *_locate(text, what))
    for t in triplets:
        if not (isinstance(t, list) and len(t) == 3 and all(isinstance(v, (int, float)) for v in t)):
            raise ParseError(f"bad triplet {t!r} in '{what}'", *_locate(text, what))
        i, k, v = int(t[0]), int(t[1]), float(t[2])
        if t[0] != i or t[1] != k or not (1 <= i <= k <= n):
            raise ParseError(f"triplet indices {t[0]}, {t[1]} must be integers with 1 <= i <= k <= {n}",
                             *_locate(text, what))
        if i == k:
            Q[i - 1, i - 1] += v
        else:
            Q[i - 1, k - 1] += v / 2.0
            Q[k - 1, i - 1] += v / 2.0
    return Q


def loads_native(text: str) -> MiqcqpInstance:
    """Parse a native document from a string."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object", 1, 1)
    for key in ("n", "bounds"):
        if key not in doc:
            raise ParseError(f"missing required field '{key}'", 1, 1)
    n, k = doc["n"], doc.get("k", 0)
    if not (isinstance(n, int) and n >= 0 and isinstance(k, int) and k >= 0):
        raise ParseError("'n' and 'k' must be non-negative integers", *_locate(text, "n"))
    bounds = doc["bounds"]
    if not isinstance(bounds, list) or len(bounds) != n:
        raise ParseError(f"'bounds' must list {n} [lo, hi] pairs", *_locate(text, "bounds"))
    ivs = []
    for j, b in enumerate(bounds):
        if not (isinstance(b, list) and len(b) == 2 and all(isinstance(v, (int, float)) for v in b)):
            raise ParseError(f"bound {j + 1} must be a [lo, hi] pair", *_locate(text, "bounds"))
        lo, hi = float(b[0]), float(b[1])
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise NonFiniteBounds(f"variable {j + 1} has a non-finite bound")
        if lo > hi:
            raise ValidationError(f"variable {j + 1}: lower bound {lo} exceeds upper bound {hi}")
        ivs.append(Interval(lo, hi))
    obj = doc.get("objective", {}) or {}
    if not isinstance(obj, dict):
        raise ParseError("'objective' must be an object", *_locate(text, "objective"))
    cons = []
    raw = doc.get("constraints", []) or []
    if not isinstance(raw, list):
        raise ParseError("'constraints' must be a list", *_locate(text, "constraints"))
    for con in raw:
        if not isinstance(con, dict):
            raise ParseError("each constraint must be an object", *_locate(text, "constraints"))
        b = con.get("b", 0.0)
        if not isinstance(b, (int, float)):
            raise ParseError("constraint 'b' must be a number", *_locate(text, "b"))
        cons.append(QuadConstraint(_matrix(con.get("Q"), n, "Q", text), _vector(con.get("c"), n, "c", text),
                                   _vector(con.get("d"), k, "d", text), float(b)))
    const = obj.get("constant", 0.0)
    if not isinstance(const, (int, float)):
        raise ParseError("objective 'constant' must be a number", *_locate(text, "constant"))
    name = doc.get("name", "")
    return MiqcqpInstance.create(ivs, _matrix(obj.get("Q"), n, "Q", text), _vector(obj.get("c"), n, "c", text),
                                 _vector(obj.get("d"), k, "d", text), float(const), cons, k,
                                 name if isinstance(name, str) else str(name))


def parse_native(path) -> MiqcqpInstance:
    """Read a native instance file; errors name the offending line and column."""
    text = Path(path).read_text()
    inst = loads_native(text)
    if not inst.name:
        inst = MiqcqpInstance.create(inst.bounds, inst.Q0, inst.c0, inst.d0, inst.const0,
                                     inst.constraints, inst.k, Path(path).stem)
    return inst


def _triplets(Q: np.ndarray) -> List[List[Any]]:
    return [[i + 1, k + 1, float(v)] for i, k, v in quadratic_terms(Q)]


def to_document(inst: MiqcqpInstance) -> Dict[str, Any]:
    return {
        "name": inst.name,
        "n": inst.n,
        "k": inst.k,
        "bounds": [[b.lo, b.hi] for b in inst.bounds],
        "objective": {"Q": _triplets(inst.Q0), "c": inst.c0.tolist(), "d": inst.d0.tolist(),
                      "constant": inst.const0},
        "constraints": [{"Q": _triplets(c.Q), "c": c.c.tolist(), "d": c.d.tolist(), "b": c.b}
                        for c in inst.constraints],
    }


def dumps_native(inst: MiqcqpInstance) -> str:
    return json.dumps(to_document(inst), indent=1)


def write_native(inst: MiqcqpInstance, path) -> None:
    Path(path).write_text(dumps_native(inst) + "\n")
