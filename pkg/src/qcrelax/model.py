"""Core data types: instances, MIP models, relaxation configuration, solutions.

The problem class is

    min  x'Q0 x + c0'x + d0'y + const0
    s.t. x'Qj x + cj'x + dj'y + bj <= 0       j = 1..m
         lo <= x <= hi,  y in {0,1}^k

with every continuous bound finite.  Quadratic matrices are stored symmetric,
so the combined coefficient of ``x_i x_k`` (i < k) is ``2 * Q[i, k]``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .errors import ConfigError, NonFiniteBounds, ValidationError

FEAS_TOL = 1e-9


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise NonFiniteBounds(f"interval [{self.lo}, {self.hi}] is not finite")
        if self.lo > self.hi:
            raise ValidationError(f"interval lower bound {self.lo} exceeds upper bound {self.hi}")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, v: float, tol: float = FEAS_TOL) -> bool:
        return self.lo - tol <= v <= self.hi + tol


UNIT = Interval(0.0, 1.0)


# ---------------------------------------------------------------------------
# MIQCQP instances
# ---------------------------------------------------------------------------

def _sym(Q, n) -> np.ndarray:
    if Q is None:
        return np.zeros((n, n))
    Q = np.asarray(Q, dtype=float)
    if Q.shape != (n, n):
        raise ValidationError(f"quadratic matrix has shape {Q.shape}, expected {(n, n)}")
    if not np.all(np.isfinite(Q)):
        raise ValidationError("quadratic matrix contains non-finite entries")
    return 0.5 * (Q + Q.T)


def _vec(v, size, what) -> np.ndarray:
    if v is None:
        return np.zeros(size)
    v = np.asarray(v, dtype=float).reshape(-1)
    if v.shape != (size,):
        raise ValidationError(f"{what} has length {v.shape[0]}, expected {size}")
    if not np.all(np.isfinite(v)):
        raise ValidationError(f"{what} contains non-finite entries")
    return v


@dataclass(frozen=True)
class QuadConstraint:
    """``x'Qx + c'x + d'y + b <= 0``."""

    Q: np.ndarray
    c: np.ndarray
    d: np.ndarray
    b: float = 0.0


@dataclass(frozen=True, eq=False)
class MiqcqpInstance:
    bounds: Tuple[Interval, ...]
    Q0: np.ndarray
    c0: np.ndarray
    d0: np.ndarray
    const0: float = 0.0
    constraints: Tuple[QuadConstraint, ...] = ()
    k: int = 0
    name: str = ""

    @classmethod
    def create(cls, bounds, Q0=None, c0=None, d0=None, const0=0.0,
               constraints=(), k=0, name="") -> "MiqcqpInstance":
        """Build a validated instance, symmetrizing every quadratic matrix.

        ``bounds`` is a sequence of ``Interval`` or ``(lo, hi)`` pairs and
        ``constraints`` a sequence of ``QuadConstraint`` or ``(Q, c, d, b)``.
        """
        bnds = []
        for b in bounds:
            if not isinstance(b, Interval):
                lo, hi = b
                if not (math.isfinite(lo) and math.isfinite(hi)):
                    raise NonFiniteBounds(f"variable {len(bnds)} has infinite bound ({lo}, {hi})")
                b = Interval(float(lo), float(hi))
            bnds.append(b)
        n = len(bnds)
        cons = []
        for con in constraints:
            if isinstance(con, QuadConstraint):
                Q, c, d, b = con.Q, con.c, con.d, con.b
            else:
                Q, c, d, b = con
            if not math.isfinite(b):
                raise ValidationError("constraint constant is not finite")
            cons.append(QuadConstraint(_sym(Q, n), _vec(c, n, "c"), _vec(d, k, "d"), float(b)))
        return cls(tuple(bnds), _sym(Q0, n), _vec(c0, n, "c0"), _vec(d0, k, "d0"),
                   float(const0), tuple(cons), int(k), name)

    @property
    def n(self) -> int:
        return len(self.bounds)

    @property
    def lo(self) -> np.ndarray:
        return np.array([b.lo for b in self.bounds])

    @property
    def hi(self) -> np.ndarray:
        return np.array([b.hi for b in self.bounds])

    def objective(self, x, y=None) -> float:
        x = np.asarray(x, dtype=float)
        y = np.zeros(self.k) if y is None else np.asarray(y, dtype=float)
        return float(x @ self.Q0 @ x + self.c0 @ x + self.d0 @ y + self.const0)

    def constraint_values(self, x, y=None) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = np.zeros(self.k) if y is None else np.asarray(y, dtype=float)
        return np.array([x @ c.Q @ x + c.c @ x + c.d @ y + c.b for c in self.constraints])

    def max_violation(self, x, y=None) -> float:
        """Largest violation of constraints, box bounds and binarity."""
        x = np.asarray(x, dtype=float)
        viol = [0.0]
        g = self.constraint_values(x, y)
        if g.size:
            viol.append(float(np.max(g)))
        viol.append(float(np.max(self.lo - x, initial=0.0)))
        viol.append(float(np.max(x - self.hi, initial=0.0)))
        if y is not None and self.k:
            y = np.asarray(y, dtype=float)
            viol.append(float(np.max(np.minimum(np.abs(y), np.abs(1 - y)))))
        return max(viol)


# ---------------------------------------------------------------------------
# Quadratic term bookkeeping
# ---------------------------------------------------------------------------

Term = Tuple[int, int]


def quadratic_terms(Q: np.ndarray, tol: float = 0.0) -> List[Tuple[int, int, float]]:
    """Canonical ``(i, k, coeff)`` triplets of ``x'Qx`` with ``i <= k``."""
    n = Q.shape[0]
    out = []
    for i in range(n):
        for k in range(i, n):
            coef = Q[i, i] if i == k else Q[i, k] + Q[k, i]
            if abs(coef) > tol:
                out.append((i, k, float(coef)))
    return out


@dataclass(frozen=True)
class TermCollection:
    terms: Tuple[Term, ...]
    objective: Tuple[Tuple[int, int, float], ...]
    constraints: Tuple[Tuple[Tuple[int, int, float], ...], ...]


def collect_quadratic_terms(inst: MiqcqpInstance) -> TermCollection:
    """Gather the distinct quadratic terms of the objective and all constraints."""
    obj = tuple(quadratic_terms(inst.Q0))
    cons = tuple(tuple(quadratic_terms(c.Q)) for c in inst.constraints)
    seen = {(i, k) for i, k, _ in obj}
    for rows in cons:
        seen.update((i, k) for i, k, _ in rows)
    return TermCollection(tuple(sorted(seen)), obj, cons)


# ---------------------------------------------------------------------------
# Normalization to the unit box
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class AffineMap:
    """``x = offset + P @ xhat`` where ``P`` scales the free coordinates."""

    offset: np.ndarray       # length n, fixed variables sit here permanently
    scale: np.ndarray        # length nf
    free: np.ndarray         # indices into the original variables

    def to_original(self, xhat) -> np.ndarray:
        x = self.offset.copy()
        x[self.free] += self.scale * np.asarray(xhat, dtype=float)
        return x

    def to_normalized(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return (x[self.free] - self.offset[self.free]) / self.scale


def _transform(Q, c, const, P, o):
    Qh = P.T @ Q @ P
    ch = P.T @ (2.0 * Q @ o + c)
    bh = float(o @ Q @ o + c @ o + const)
    return 0.5 * (Qh + Qh.T), ch, bh


def normalize_instance(inst: MiqcqpInstance) -> Tuple[MiqcqpInstance, AffineMap]:
    """Map the instance onto ``[0, 1]^n`` via ``x = lo + (hi - lo) * xhat``.

    Variables with ``lo == hi`` are substituted out as constants.
    """
    lo, hi = inst.lo, inst.hi
    if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
        raise NonFiniteBounds("instance has infinite variable bounds")
    free = np.flatnonzero(hi > lo)
    scale = (hi - lo)[free]
    P = np.zeros((inst.n, free.size))
    P[free, np.arange(free.size)] = scale
    o = lo.copy()
    Q0, c0, b0 = _transform(inst.Q0, inst.c0, inst.const0, P, o)
    cons = []
    for con in inst.constraints:
        Q, c, b = _transform(con.Q, con.c, con.b, P, o)
        cons.append(QuadConstraint(Q, c, con.d.copy(), b))
    norm = MiqcqpInstance.create([UNIT] * free.size, Q0, c0, inst.d0.copy(), b0,
                                 cons, inst.k, inst.name)
    return norm, AffineMap(o, scale, free)


# ---------------------------------------------------------------------------
# Mixed-binary linear models
# ---------------------------------------------------------------------------

class VarKind(enum.Enum):
    CONTINUOUS = "continuous"
    BINARY = "binary"


@dataclass(frozen=True)
class Variable:
    name: str
    kind: VarKind = VarKind.CONTINUOUS
    lo: float = -math.inf
    hi: float = math.inf

    @property
    def is_binary(self) -> bool:
        return self.kind is VarKind.BINARY


def continuous(name, lo=-math.inf, hi=math.inf) -> Variable:
    return Variable(name, VarKind.CONTINUOUS, float(lo), float(hi))


def binary(name) -> Variable:
    return Variable(name, VarKind.BINARY, 0.0, 1.0)


SENSES = ("<=", "==", ">=")


@dataclass(frozen=True)
class Row:
    coefs: Mapping[str, float]
    sense: str
    rhs: float
    name: str = ""

    def activity(self, values: Mapping[str, float]) -> float:
        return sum(a * values[v] for v, a in self.coefs.items())

    def violation(self, values: Mapping[str, float]) -> float:
        act = self.activity(values)
        if self.sense == "<=":
            return max(0.0, act - self.rhs)
        if self.sense == ">=":
            return max(0.0, self.rhs - act)
        return abs(act - self.rhs)


def row(coefs: Mapping[str, float], sense: str, rhs: float, name: str = "") -> Row:
    """Make a row, merging nothing but dropping exact-zero coefficients."""
    if sense not in SENSES:
        raise ValidationError(f"unknown row sense {sense!r}")
    return Row({v: float(a) for v, a in coefs.items() if a != 0.0}, sense, float(rhs), name)


def linear_combination(*pairs: Tuple[str, float]) -> Dict[str, float]:
    """Sum ``(var, coef)`` pairs, merging repeated variables."""
    out: Dict[str, float] = {}
    for v, a in pairs:
        out[v] = out.get(v, 0.0) + a
    return out


@dataclass
class LinearFragment:
    """New variables plus rows that may also reference host variables."""

    new_vars: List[Variable] = field(default_factory=list)
    rows: List[Row] = field(default_factory=list)

    def extend(self, other: "LinearFragment") -> "LinearFragment":
        self.new_vars.extend(other.new_vars)
        self.rows.extend(other.rows)
        return self

    def max_violation(self, values: Mapping[str, float]) -> float:
        viol = [r.violation(values) for r in self.rows]
        for v in self.new_vars:
            if v.name in values:
                viol.append(max(0.0, v.lo - values[v.name], values[v.name] - v.hi))
        return max(viol, default=0.0)


@dataclass(frozen=True, eq=False)
class MipModel:
    variables: Tuple[Variable, ...]
    rows: Tuple[Row, ...]
    objective: Mapping[str, float]
    constant: float = 0.0
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "_index", {v.name: i for i, v in enumerate(self.variables)})

    @property
    def index(self) -> Dict[str, int]:
        return self._index

    @property
    def n_vars(self) -> int:
        return len(self.variables)

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    @property
    def binaries(self) -> List[str]:
        return [v.name for v in self.variables if v.is_binary]

    def var(self, name: str) -> Variable:
        return self.variables[self._index[name]]

    def validate(self) -> None:
        """Raise ``ValidationError`` unless the model is structurally sound."""
        if len(self._index) != len(self.variables):
            raise ValidationError("duplicate variable names")
        for v in self.variables:
            if math.isnan(v.lo) or math.isnan(v.hi) or v.lo > v.hi:
                raise ValidationError(f"variable {v.name} has invalid bounds [{v.lo}, {v.hi}]")
            if v.is_binary and (v.lo < 0.0 or v.hi > 1.0):
                raise ValidationError(f"binary {v.name} bounds exceed [0, 1]")
        for r in self.rows:
            if r.sense not in SENSES or not math.isfinite(r.rhs):
                raise ValidationError(f"row {r.name!r} is malformed")
            for name, a in r.coefs.items():
                if name not in self._index:
                    raise ValidationError(f"row {r.name!r} references undeclared variable {name}")
                if not math.isfinite(a):
                    raise ValidationError(f"row {r.name!r} has non-finite coefficient on {name}")
        for name, a in self.objective.items():
            if name not in self._index or not math.isfinite(a):
                raise ValidationError(f"bad objective entry on {name}")
        if not math.isfinite(self.constant):
            raise ValidationError("objective constant is not finite")

    def evaluate(self, values: Mapping[str, float]) -> float:
        return self.constant + sum(a * values[v] for v, a in self.objective.items())

    def max_violation(self, values: Mapping[str, float], integrality: bool = True) -> float:
        worst = 0.0
        for r in self.rows:
            worst = max(worst, r.violation(values))
        for v in self.variables:
            x = values[v.name]
            worst = max(worst, v.lo - x, x - v.hi)
            if integrality and v.is_binary:
                worst = max(worst, min(abs(x), abs(1.0 - x)))
        return worst

    def to_vector(self, values: Mapping[str, float]) -> np.ndarray:
        return np.array([values[v.name] for v in self.variables])

    def to_dict(self, x: Sequence[float]) -> Dict[str, float]:
        return {v.name: float(x[i]) for i, v in enumerate(self.variables)}


class ModelBuilder:
    """Accumulates variables and rows, then freezes them into a ``MipModel``."""

    def __init__(self, name: str = ""):
        self.name = name
        self._vars: Dict[str, Variable] = {}
        self._rows: List[Row] = []
        self.objective: Dict[str, float] = {}
        self.constant = 0.0

    def __contains__(self, name: str) -> bool:
        return name in self._vars

    def add_var(self, var: Variable) -> str:
        if var.name in self._vars:
            raise ValidationError(f"variable {var.name} declared twice")
        self._vars[var.name] = var
        return var.name

    def add_row(self, r: Row) -> None:
        self._rows.append(r)

    def add_fragment(self, frag: LinearFragment) -> None:
        for v in frag.new_vars:
            self.add_var(v)
        self._rows.extend(frag.rows)

    def add_objective(self, name: str, coef: float) -> None:
        self.objective[name] = self.objective.get(name, 0.0) + coef

    @property
    def n_rows(self) -> int:
        return len(self._rows)

    def build(self) -> MipModel:
        obj = {v: a for v, a in self.objective.items() if a != 0.0}
        model = MipModel(tuple(self._vars.values()), tuple(self._rows), obj,
                         float(self.constant), self.name)
        model.validate()
        return model


# ---------------------------------------------------------------------------
# Configuration and results
# ---------------------------------------------------------------------------

class Method(enum.Enum):
    MCCORMICK = "mc"
    NMDT = "nmdt"
    TNMDT = "tnmdt"
    DNMDT = "dnmdt"
    TDNMDT = "tdnmdt"

    @property
    def tightened(self) -> bool:
        return self in (Method.TNMDT, Method.TDNMDT)

    @property
    def doubly(self) -> bool:
        return self in (Method.DNMDT, Method.TDNMDT)

    @classmethod
    def parse(cls, value) -> "Method":
        if isinstance(value, cls):
            return value
        key = str(value).lower().replace("-", "").replace("_", "")
        aliases = {"mccormick": "mc", "mccormickonly": "mc", "tdnmdt": "tdnmdt"}
        key = aliases.get(key, key)
        for m in cls:
            if m.value == key:
                return m
        raise ConfigError(f"unknown method {value!r}")


def default_tightening_depth(L: int) -> int:
    """``max(2, ceil(1.5 L))``."""
    return max(2, math.ceil(1.5 * L))


@dataclass(frozen=True)
class RelaxConfig:
    method: Method = Method.DNMDT
    L: int = 1
    L1: Optional[int] = None
    lam: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "method", Method.parse(self.method))
        if self.method is not Method.MCCORMICK and (not isinstance(self.L, int) or self.L < 1):
            raise ConfigError(f"depth L must be a positive integer, got {self.L!r}")
        if self.L1 is None:
            object.__setattr__(self, "L1", default_tightening_depth(self.L) if self.method.tightened else self.L)
        if not isinstance(self.L1, int) or self.L1 < 1:
            raise ConfigError(f"tightening depth L1 must be a positive integer, got {self.L1!r}")
        if self.method is not Method.MCCORMICK and self.L1 < self.L:
            raise ConfigError(f"tightening depth L1={self.L1} is smaller than L={self.L}")
        if not (0.0 <= self.lam <= 1.0):
            raise ConfigError(f"lambda must lie in [0, 1], got {self.lam}")


@dataclass
class VarDigits:
    """Shared base-2 discretization of one unit-box variable."""

    beta: List[str]
    delta: str


@dataclass
class TermMap:
    aux: Dict[Term, str] = field(default_factory=dict)
    digits: Dict[int, VarDigits] = field(default_factory=dict)
    fragments: Dict[Term, object] = field(default_factory=dict)
    sawtooth: Dict[int, object] = field(default_factory=dict)


class Status(enum.Enum):
    OPTIMAL = "Optimal"
    FEASIBLE = "Feasible"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"
    LIMIT = "LimitReached"


@dataclass
class Solution:
    values: Dict[str, float]
    objective_value: float
    status: Status

    @property
    def ok(self) -> bool:
        return self.status in (Status.OPTIMAL, Status.FEASIBLE)

    def __getitem__(self, name: str) -> float:
        return self.values[name]


def variable_names(prefix: str, count: int, start: int = 1) -> List[str]:
    return [f"{prefix}{j}" for j in range(start, start + count)]


def iter_terms(rows: Iterable[Tuple[int, int, float]]):
    for i, k, a in rows:
        yield (i, k), a
