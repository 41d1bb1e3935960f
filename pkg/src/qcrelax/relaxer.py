"""Whole-instance relaxation: normalize, lift every quadratic term, emit fragments."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Set, Tuple

import numpy as np

from .dnmdt import relax_bilinear_dnmdt, relax_square_dnmdt, relax_square_tdnmdt
from .envelopes import bilinear_envelope, square_envelope
from .errors import ValidationFailure
from .model import (UNIT, AffineMap, Method, MiqcqpInstance, MipModel, ModelBuilder,
                    RelaxConfig, Term, TermMap, VarDigits, binary, collect_quadratic_terms,
                    continuous, normalize_instance, row)
from .nmdt import DigitFragment, binary_digits, build_digits, relax_bilinear_nmdt, relax_square_nmdt, relax_square_tnmdt
from .sawtooth import SawtoothFragment, build_sawtooth_lp


def xname(i: int) -> str:
    return f"x{i}"


def yname(l: int) -> str:
    return f"y{l}"


def zname(term: Term) -> str:
    return f"z{term[0]}_{term[1]}"


def predict_counts(n: int, cfg: RelaxConfig) -> Dict[str, int]:
    """Binary and row counts for a completely dense ``n``-variable instance.

    NMDT variants use ``nL`` binaries and ``n((5n+7)/2 + 2(n+1)L)`` rows,
    D-NMDT variants ``nL`` and ``n((5n+5)/2 + 4nL)``.  The row formulas follow
    a counting convention that is not spelled out, so treat them as advisory.
    McCormick-only counts are by construction (3 rows per square, 4 per product).
    """
    if n <= 0:
        return {"binaries": 0, "rows": 0}
    L = cfg.L
    if cfg.method is Method.MCCORMICK:
        return {"binaries": 0, "rows": 3 * n + 2 * n * (n - 1)}
    if cfg.method.doubly:
        return {"binaries": n * L, "rows": n * (5 * n + 5) // 2 + 4 * n * n * L}
    return {"binaries": n * L, "rows": n * (5 * n + 7) // 2 + 2 * n * (n + 1) * L}


def greedy_cover(terms: Sequence[Term], forced: Set[int]) -> Set[int]:
    """Vertex cover of the bilinear product graph, seeded with ``forced``.

    Repeatedly takes the vertex touching most uncovered edges; ties go to the
    lower index.
    """
    cover = set(forced)
    edges = [(i, k) for i, k in terms if i != k and i not in cover and k not in cover]
    while edges:
        degree: Dict[int, int] = {}
        for i, k in edges:
            degree[i] = degree.get(i, 0) + 1
            degree[k] = degree.get(k, 0) + 1
        v = min(degree, key=lambda u: (-degree[u], u))
        cover.add(v)
        edges = [(i, k) for i, k in edges if i != v and k != v]
    return cover


@dataclass
class RelaxationResult:
    model: MipModel
    term_map: TermMap
    back_map: AffineMap
    normalized: MiqcqpInstance
    config: RelaxConfig
    predicted_counts: Dict[str, int]
    actual_counts: Dict[str, int]
    order: List[object] = field(default_factory=list, repr=False)

    def extend(self, x, y=None) -> Dict[str, float]:
        """Canonical model point for an original point ``(x, y)``."""
        xh = self.back_map.to_normalized(x)
        xh = np.clip(xh, 0.0, 1.0)
        values: Dict[str, float] = {xname(i): float(v) for i, v in enumerate(xh)}
        yv = np.zeros(self.normalized.k) if y is None else np.asarray(y, dtype=float)
        for l, v in enumerate(yv):
            values[yname(l)] = float(v)
        for (i, k), z in self.term_map.aux.items():
            values[z] = float(xh[i] * xh[k])
        for part in self.order:
            part.complete(values)
        return values

    def completion_heuristic(self):
        """Binary fixings that place each discretized variable in its LP value's digit cell.

        Returns a callable for ``solve_mip(..., heuristic=...)``.
        """
        idx = self.model.index
        blocks = [(idx[xname(i)], [idx[b] for b in d.beta]) for i, d in self.term_map.digits.items()]
        ys = [idx[yname(l)] for l in range(self.normalized.k)]

        def fix(col_values):
            out = {}
            for xi, betas in blocks:
                digits, _ = binary_digits(col_values[xi], len(betas))
                out.update(zip(betas, map(float, digits)))
            for j in ys:
                out[j] = float(round(col_values[j]))
            return out
        return fix

    def original_point(self, values) -> Tuple[np.ndarray, np.ndarray]:
        """Map model values (dict or ``Solution``) back to the original ``(x, y)``."""
        vals = values.values if hasattr(values, "values") and not isinstance(values, dict) else values
        xh = np.array([vals[xname(i)] for i in range(self.normalized.n)])
        y = np.array([vals[yname(l)] for l in range(self.normalized.k)])
        return self.back_map.to_original(xh), y


def _quadratic_row(coefs: Dict[str, float], quad, c, d, aux):
    for i, k, a in quad:
        coefs[aux[(i, k)]] = coefs.get(aux[(i, k)], 0.0) + a
    for i, a in enumerate(c):
        if a != 0.0:
            coefs[xname(i)] = coefs.get(xname(i), 0.0) + a
    for l, a in enumerate(d):
        if a != 0.0:
            coefs[yname(l)] = coefs.get(yname(l), 0.0) + a
    return coefs


def build_relaxation(inst: MiqcqpInstance, cfg: RelaxConfig) -> RelaxationResult:
    """MIP relaxation of ``inst`` in which every quadratic term gets one shared auxiliary.

    The instance is first mapped to the unit box; linear parts pass through.
    """
    norm, amap = normalize_instance(inst)
    terms = collect_quadratic_terms(norm)
    method, L = cfg.method, cfg.L
    b = ModelBuilder(f"{inst.name or 'instance'}-{method.value}-L{L}")
    for i in range(norm.n):
        b.add_var(continuous(xname(i), 0.0, 1.0))
    for l in range(norm.k):
        b.add_var(binary(yname(l)))

    tm = TermMap()
    for t in terms.terms:
        tm.aux[t] = b.add_var(continuous(zname(t), 0.0, 1.0))

    order: List[object] = []
    squares = {i for i, k in terms.terms if i == k}
    if method is Method.MCCORMICK:
        for t in terms.terms:
            i, k = t
            frag = (square_envelope(xname(i), UNIT, tm.aux[t]) if i == k else
                    bilinear_envelope(xname(i), UNIT, xname(k), UNIT, tm.aux[t]))
            b.add_fragment(frag)
            tm.fragments[t] = frag
    else:
        involved = {i for t in terms.terms for i in t}
        if method.doubly:
            discretized = involved
        else:
            discretized = greedy_cover(terms.terms, squares)
        digits: Dict[int, DigitFragment] = {}
        for i in sorted(discretized):
            d = build_digits(xname(i), L, f"x{i}_")
            b.add_fragment(d)
            digits[i] = d
            tm.digits[i] = VarDigits(list(d.beta), d.delta)
            order.append(d)
        saw: Dict[int, SawtoothFragment] = {}
        if method.tightened:
            for i in sorted(squares):
                s = build_sawtooth_lp(xname(i), cfg.L1, f"x{i}_saw_")
                b.add_fragment(s)
                saw[i] = s
                tm.sawtooth[i] = s
                order.append(s)
        for t in terms.terms:
            i, k = t
            z = tm.aux[t]
            pre = f"t{i}_{k}_"
            if i == k:
                if method is Method.NMDT:
                    frag = relax_square_nmdt(z, xname(i), L, digits[i], pre)
                elif method is Method.TNMDT:
                    frag = relax_square_tnmdt(z, xname(i), L, cfg.L1, digits[i], saw[i], pre)
                elif method is Method.DNMDT:
                    frag = relax_square_dnmdt(z, xname(i), L, digits[i], pre)
                else:
                    frag = relax_square_tdnmdt(z, xname(i), L, cfg.L1, digits[i], saw[i], pre)
            elif method.doubly:
                frag = relax_bilinear_dnmdt(z, xname(i), xname(k), L, cfg.lam, digits[i], digits[k], pre)
            else:
                side, dv = ("x", i) if i in discretized else ("y", k)
                frag = relax_bilinear_nmdt(z, xname(i), xname(k), L, side, digits[dv], pre)
            b.add_fragment(frag)
            tm.fragments[t] = frag
            order.append(frag)

    for name, a in _quadratic_row({}, terms.objective, norm.c0, norm.d0, tm.aux).items():
        b.add_objective(name, a)
    b.constant = norm.const0
    for j, (con, quad) in enumerate(zip(norm.constraints, terms.constraints)):
        coefs = _quadratic_row({}, quad, con.c, con.d, tm.aux)
        b.add_row(row(coefs, "<=", -con.b, f"con{j}"))

    model = b.build()
    n_digit = sum(len(d.beta) for d in tm.digits.values())
    actual = {"binaries": n_digit, "rows": model.n_rows}
    return RelaxationResult(model, tm, amap, norm, cfg, predict_counts(norm.n, cfg), actual, order)


@dataclass
class ValidationReport:
    checked: int
    attempts: int
    worst_violation: float
    worst_objective_gap: float


def sample_feasible_points(inst: MiqcqpInstance, samples: int, rng, max_attempts: Optional[int] = None,
                           tol: float = 0.0):
    """Rejection-sample ``samples`` points of the original feasible set."""
    lo, hi = inst.lo, inst.hi
    max_attempts = max_attempts or 200 * samples
    pts = []
    attempts = 0
    while len(pts) < samples and attempts < max_attempts:
        attempts += 1
        x = lo + (hi - lo) * rng.random(inst.n)
        y = rng.integers(0, 2, inst.k).astype(float)
        if inst.constraints and np.max(inst.constraint_values(x, y)) > tol:
            continue
        pts.append((x, y))
    return pts, attempts


def validate_relaxation(inst: MiqcqpInstance, result: RelaxationResult, samples: int = 100,
                        seed: int = 0, tol: float = 1e-8) -> ValidationReport:
    """Check that sampled feasible points extend to model-feasible points.

    Raises ``ValidationFailure`` carrying the first offending point.
    """
    rng = np.random.default_rng(seed)
    pts, attempts = sample_feasible_points(inst, samples, rng)
    worst = 0.0
    worst_obj = 0.0
    for x, y in pts:
        vals = result.extend(x, y)
        viol = result.model.max_violation(vals)
        gap = abs(result.model.evaluate(vals) - inst.objective(x, y))
        if viol > tol:
            raise ValidationFailure(f"extension violates the relaxation by {viol:.3g}", (x, y), viol)
        if gap > 1e-8 * max(1.0, abs(inst.objective(x, y))):
            raise ValidationFailure(f"objective mismatch {gap:.3g} under extension", (x, y), gap)
        worst = max(worst, viol)
        worst_obj = max(worst_obj, gap)
    return ValidationReport(len(pts), attempts, worst, worst_obj)
