"""Box-constrained QP text files: ``n``, then ``c``, then ``n`` rows of ``Q``.

Instances read as ``min 1/2 x'Qx + c'x`` over ``[0, 1]^n`` (``maximize=True``
negates the objective).
"""
from __future__ import annotations

import warnings
from pathlib import Path
from typing import List, Tuple

import numpy as np

from ..errors import ParseError
from ..model import MiqcqpInstance

SYMMETRY_TOL = 1e-9


def _numbers(line: str, lineno: int) -> List[float]:
    out = []
    col = 1
    for tok in line.split():
        col = line.index(tok, col - 1) + 1
        try:
            out.append(float(tok))
        except ValueError:
            raise ParseError(f"not a number: {tok!r}", lineno, col) from None
        col += len(tok)
    return out


def loads_boxqp(text: str, maximize: bool = False, name: str = "") -> MiqcqpInstance:
    lines = [(i + 1, ln) for i, ln in enumerate(text.splitlines()) if ln.strip()]
    if not lines:
        raise ParseError("empty boxQP file", 1, 1)
    lineno, first = lines[0]
    head = _numbers(first, lineno)
    if len(head) != 1 or head[0] != int(head[0]) or head[0] < 1:
        raise ParseError("first line must hold the dimension n >= 1", lineno, 1)
    n = int(head[0])
    if len(lines) != n + 2:
        last = lines[-1][0]
        raise ParseError(f"expected {n + 2} non-empty lines (n, c, {n} rows of Q), found {len(lines)}", last, 1)
    lineno, cl = lines[1]
    c = _numbers(cl, lineno)
    if len(c) != n:
        raise ParseError(f"c has {len(c)} entries, expected {n}", lineno, 1)
    Q = np.zeros((n, n))
    for r, (lineno, ql) in enumerate(lines[2:]):
        vals = _numbers(ql, lineno)
        if len(vals) != n:
            raise ParseError(f"row {r + 1} of Q has {len(vals)} entries, expected {n}", lineno, 1)
        Q[r] = vals
    if not np.all(np.isfinite(Q)) or not np.all(np.isfinite(c)):
        raise ParseError("non-finite coefficient", lines[1][0], 1)
    if np.max(np.abs(Q - Q.T), initial=0.0) > SYMMETRY_TOL:
        warnings.warn("boxQP matrix is not symmetric; averaging with its transpose", stacklevel=2)
    Q = 0.5 * (Q + Q.T)
    sign = -1.0 if maximize else 1.0
    return MiqcqpInstance.create([(0.0, 1.0)] * n, sign * 0.5 * Q, sign * np.asarray(c), name=name)


def parse_boxqp(path, maximize: bool = False) -> MiqcqpInstance:
    """Read a boxQP file as ``min 1/2 x'Qx + c'x`` over the unit box."""
    return loads_boxqp(Path(path).read_text(), maximize, Path(path).stem)


def generate_boxqp(n: int, density: float = 1.0, seed: int = 0) -> Tuple[np.ndarray, np.ndarray]:
    """Random boxQP data in the usual family: integer entries uniform on ``[-50, 50]``.

    Off-diagonal pairs and linear terms are kept with probability ``density``.
    Returns a symmetric ``Q`` and ``c``.
    """
    rng = np.random.default_rng(seed)
    Q = np.zeros((n, n))
    for i in range(n):
        for k in range(i, n):
            if rng.random() < density:
                Q[i, k] = Q[k, i] = rng.integers(-50, 51)
    c = np.where(rng.random(n) < density, rng.integers(-50, 51, n), 0).astype(float)
    return Q, c


def boxqp_instance(Q, c, name: str = "") -> MiqcqpInstance:
    return loads_boxqp(dumps_boxqp(Q, c), name=name)


def dumps_boxqp(Q, c) -> str:
    Q = np.asarray(Q, float)
    rows = [str(Q.shape[0]), " ".join(repr(float(v)) for v in c)]
    rows += [" ".join(repr(float(v)) for v in r) for r in Q]
    return "\n".join(rows) + "\n"


def write_boxqp(Q, c, path) -> None:
    Path(path).write_text(dumps_boxqp(Q, c))
