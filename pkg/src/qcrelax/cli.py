"""Command-line entry point: ``qcrelax relax | solve | analyze | bench | report``."""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from .analysis import error_report, performance_profile, shifted_geomean
from .analysis.stats import solved_subset
from .errors import QcRelaxError
from .io import (ERROR_FIELDS, PROFILE_FIELDS, RUN_FIELDS, SGM_FIELDS, CsvSink, export_lp_file,
                 parse_boxqp, parse_native, read_rows, write_model)
from .io.csvio import to_float
from .io.modeljson import loads_model
from .model import Method, RelaxConfig, Status
from .relaxer import build_relaxation
from .solver import SolveLimits, compute_gap, primal_recovery, solve_mip

DEFAULT_DEPTHS = "1,2,4,6"
SGM_SHIFT = 10.0


class UsageError(Exception):
    pass


def default_seed() -> int:
    raw = os.environ.get("QCRELAX_SEED", "42")
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"QCRELAX_SEED must be an integer, got {raw!r}") from None


def load_instance(path, maximize: bool = False):
    """Native JSON for ``.json`` files, boxQP text otherwise."""
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"no such file: {path}")
    if p.suffix.lower() == ".json":
        if maximize:
            raise UsageError("--maximize applies to boxQP files only")
        return parse_native(p)
    return parse_boxqp(p, maximize=maximize)


def _config(args) -> RelaxConfig:
    try:
        return RelaxConfig(Method.parse(args.method), args.L, args.L1, args.lam)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _limits(args) -> SolveLimits:
    return SolveLimits(max_nodes=args.node_limit, max_seconds=args.time_limit, rel_gap=args.gap)


def _fmt(v: float) -> str:
    return "inf" if v == math.inf else "-inf" if v == -math.inf else f"{v:.10g}"


def term_summary(rel) -> dict:
    tm = rel.term_map
    return {
        "instance": rel.normalized.name,
        "method": rel.config.method.value,
        "L": rel.config.L,
        "L1": rel.config.L1 if rel.config.method.tightened else None,
        "lambda": rel.config.lam,
        "predicted_counts": rel.predicted_counts,
        "actual_counts": rel.actual_counts,
        "variables": rel.model.n_vars,
        "aux": {f"{i + 1},{k + 1}": z for (i, k), z in sorted(tm.aux.items())},
        "digits": {str(i + 1): {"beta": d.beta, "delta": d.delta} for i, d in sorted(tm.digits.items())},
    }


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_relax(args) -> int:
    cfg = _config(args)
    inst = load_instance(args.instance, args.maximize)
    rel = build_relaxation(inst, cfg)
    out = Path(args.out) if args.out else Path(args.instance).with_suffix(f".{cfg.method.value}.L{cfg.L}.lp")
    if out.suffix.lower() == ".json":
        write_model(rel.model, out)
    else:
        export_lp_file(rel.model, out)
    side = out.with_suffix(".terms.json")
    side.write_text(json.dumps(term_summary(rel), indent=1) + "\n")
    print(f"model: {out}")
    print(f"terms: {side}")
    print(f"variables {rel.model.n_vars}  rows {rel.model.n_rows}  binaries {len(rel.model.binaries)}")
    return 0


def _read_model_or_instance(path, maximize):
    p = Path(path)
    if p.suffix.lower() == ".json" and p.is_file():
        doc = json.loads(p.read_text())
        if isinstance(doc, dict) and "variables" in doc:
            return loads_model(p.read_text()), None
    if p.suffix.lower() == ".lp":
        raise UsageError("LP files are export-only; pass a .json model or an instance")
    return None, load_instance(path, maximize)


def cmd_solve(args) -> int:
    model, inst = _read_model_or_instance(args.input, args.maximize)
    rel = None
    if inst is not None:
        rel = build_relaxation(inst, _config(args))
        model = rel.model
    res = solve_mip(model, _limits(args), heuristic=rel.completion_heuristic() if rel else None)
    primal = res.primal_bound
    print(f"status      {res.status.value}")
    print(f"dual_bound  {_fmt(res.dual_bound)}")
    print(f"incumbent   {_fmt(primal)}")
    print(f"gap         {_fmt(compute_gap(primal, res.dual_bound)) if math.isfinite(primal) else 'inf'}")
    print(f"nodes       {res.node_count}")
    print(f"seconds     {res.seconds:.3f}")
    if rel is not None and res.incumbent is not None:
        rec = primal_recovery(inst, res.incumbent, rel)
        verdict = "feasible" if rec.feasible else "infeasible"
        print(f"recovered   {_fmt(rec.objective)} ({verdict}, max violation {rec.max_violation:.3g})")
    return 0


def cmd_analyze(args) -> int:
    seed = default_seed() if args.seed is None else args.seed
    try:
        rep = error_report(args.method, args.L, args.L1, args.lam, args.univariate, args.samples, seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.out:
        with CsvSink(args.out, ERROR_FIELDS, append=True) as sink:
            sink.write(rep.as_row())
    else:
        import csv
        w = csv.DictWriter(sys.stdout, ERROR_FIELDS)
        w.writeheader()
        w.writerow({k: ("" if v is None else v) for k, v in rep.as_row().items()})
    return 0


def run_job(job) -> dict:
    """Build and solve one (instance, method, L) relaxation; one ``RUN_FIELDS`` row."""
    path, method, L, limits, maximize = job
    inst = load_instance(path, maximize)
    m = Method.parse(method)
    cfg = RelaxConfig(m, max(L, 1)) if m is not Method.MCCORMICK else RelaxConfig(m, 1)
    t0 = time.perf_counter()
    rel = build_relaxation(inst, cfg)
    res = solve_mip(rel.model, limits, heuristic=rel.completion_heuristic())
    wall = time.perf_counter() - t0
    primal = res.primal_bound
    gap = compute_gap(primal, res.dual_bound) if math.isfinite(primal) else math.inf
    return {"instance": inst.name or Path(path).stem, "method": m.value,
            "L": 0 if m is Method.MCCORMICK else L, "L1": cfg.L1 if m.tightened else None,
            "status": res.status.value, "dual_bound": res.dual_bound, "primal": primal,
            "gap": gap, "nodes": res.node_count, "wall_time": wall}


def bench_jobs(files: Sequence[Path], methods: Sequence[str], depths: Sequence[int], limits, maximize):
    jobs = []
    for f in files:
        for m in methods:
            if Method.parse(m) is Method.MCCORMICK:
                jobs.append((str(f), m, 0, limits, maximize))
            else:
                jobs.extend((str(f), m, L, limits, maximize) for L in depths)
    return jobs


def _int_list(text: str) -> List[int]:
    try:
        out = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None
    if not out or min(out) < 1:
        raise UsageError("depths must be positive integers")
    return out


def cmd_bench(args) -> int:
    root = Path(args.instances)
    if not root.is_dir():
        raise UsageError(f"not a directory: {root}")
    files = sorted(p for p in root.iterdir() if p.is_file() and not p.name.startswith("."))
    if not files:
        raise UsageError(f"no instance files in {root}")
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    try:
        for m in methods:
            Method.parse(m)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    limits = SolveLimits(max_seconds=args.time_limit, rel_gap=args.gap, max_nodes=args.node_limit)
    jobs = bench_jobs(files, methods, _int_list(args.depths), limits, args.maximize)
    with CsvSink(args.out, RUN_FIELDS) as sink:
        if args.jobs <= 1:
            for job in jobs:
                sink.write(run_job(job))
        else:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                for row in pool.map(run_job, jobs):
                    sink.write(row)
    print(f"{len(jobs)} runs written to {args.out}")
    return 0


def summarize_runs(rows: Sequence[Dict[str, str]], shift: float = SGM_SHIFT):
    """Profile table over dual bounds and SGM rows, both on the instances some method solved."""
    bounds: Dict[str, Dict[str, float]] = {}
    status: Dict[str, Dict[str, str]] = {}
    times: Dict[str, Dict[str, float]] = {}
    for r in rows:
        label = r["method"] if r["method"] == Method.MCCORMICK.value else f"{r['method']}-L{r['L']}"
        bounds.setdefault(label, {})[r["instance"]] = to_float(r["dual_bound"])
        status.setdefault(label, {})[r["instance"]] = r["status"]
        times.setdefault(label, {})[r["instance"]] = to_float(r["wall_time"])
    keep = set(solved_subset(status, Status.OPTIMAL.value))
    if not keep:
        raise UsageError("no instance was solved to optimality by any method")
    table = performance_profile({m: {i: v for i, v in b.items() if i in keep} for m, b in bounds.items()},
                                orientation="max")
    sgm = []
    for m, t in times.items():
        vals = [v for i, v in t.items() if i in keep and math.isfinite(v)]
        if vals:
            sgm.append({"method": m, "instances": len(vals),
                        "shifted_geomean_time": shifted_geomean(vals, shift), "shift": shift})
    return table, sgm


def cmd_report(args) -> int:
    if not Path(args.runs).is_file():
        raise UsageError(f"no such file: {args.runs}")
    rows = read_rows(args.runs)
    missing = set(RUN_FIELDS) - set(rows[0]) if rows else set(RUN_FIELDS)
    if missing:
        raise UsageError(f"runs file lacks columns: {', '.join(sorted(missing))}")
    table, sgm = summarize_runs(rows, args.shift)
    stem = Path(args.out_prefix) if args.out_prefix else Path(args.runs).with_suffix("")
    prof_path, sgm_path = Path(f"{stem}_profile.csv"), Path(f"{stem}_sgm.csv")
    with CsvSink(prof_path, PROFILE_FIELDS) as sink:
        for m, tau, frac in table.step_rows():
            sink.write({"method": m, "tau": tau, "fraction": frac})
    with CsvSink(sgm_path, SGM_FIELDS) as sink:
        for r in sgm:
            sink.write(r)
    print(f"profile: {prof_path} ({len(table.instances)} instances)")
    print(f"sgm:     {sgm_path}")
    for r in sgm:
        print(f"  {r['method']:<14} {r['shifted_geomean_time']:.4f} s")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _relax_options(p, required=True):
    p.add_argument("--method", required=required, default=None if required else "dnmdt",
                   help="mc | nmdt | tnmdt | dnmdt | tdnmdt")
    p.add_argument("--L", type=int, default=1, help="discretization depth")
    p.add_argument("--L1", type=int, default=None, help="sawtooth depth for tightened methods")
    p.add_argument("--lambda", dest="lam", type=float, default=0.5, help="D-NMDT blend weight in [0, 1]")
    p.add_argument("--maximize", action="store_true", help="negate boxQP objectives")


def _limit_options(p):
    p.add_argument("--time-limit", type=float, default=3600.0)
    p.add_argument("--node-limit", type=int, default=1_000_000)
    p.add_argument("--gap", type=float, default=1e-4, help="relative optimality gap")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qcrelax", description="MIP relaxations of box-bounded MIQCQPs")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("relax", help="build a relaxation and write it as LP or JSON")
    p.add_argument("instance")
    _relax_options(p)
    p.add_argument("--out", help="output model path (.lp or .json)")
    p.set_defaults(func=cmd_relax)

    p = sub.add_parser("solve", help="solve a JSON model, or relax and solve an instance")
    p.add_argument("input")
    _relax_options(p, required=False)
    _limit_options(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("analyze", help="error report row for one method and depth")
    p.add_argument("--method", required=True, help="mc | nmdt | tnmdt | dnmdt | tdnmdt | ser")
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--L1", type=int, default=None)
    p.add_argument("--lambda", dest="lam", type=float, default=0.5)
    p.add_argument("--univariate", action="store_true", help="analyze x^2 instead of xy")
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=None, help="defaults to $QCRELAX_SEED or 42")
    p.add_argument("--out", help="append the row to this CSV instead of printing")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("bench", help="solve every instance x method x depth")
    p.add_argument("--instances", required=True, help="directory of .json (native) or boxQP files")
    p.add_argument("--methods", default="mc,nmdt,tnmdt,dnmdt,tdnmdt")
    p.add_argument("--depths", default=DEFAULT_DEPTHS)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default="runs.csv")
    p.add_argument("--maximize", action="store_true")
    _limit_options(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("report", help="performance profile and shifted geometric means from a runs CSV")
    p.add_argument("--runs", required=True)
    p.add_argument("--out-prefix", default=None, help="writes PREFIX_profile.csv and PREFIX_sgm.csv")
    p.add_argument("--shift", type=float, default=SGM_SHIFT)
    p.set_defaults(func=cmd_report)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.exit(2, f"qcrelax {args.command}: error: {exc}\n")
    except QcRelaxError as exc:
        parser.exit(1, f"qcrelax {args.command}: {type(exc).__name__}: {exc}\n")


if __name__ == "__main__":
    sys.exit(main())
