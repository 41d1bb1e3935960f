import csv
import json

import pytest

from qcrelax.cli import main, summarize_runs
from qcrelax.io import generate_boxqp, read_rows, write_boxqp


@pytest.fixture
def inst_dir(tmp_path):
    d = tmp_path / "inst"
    d.mkdir()
    for s in range(2):
        Q, c = generate_boxqp(3, seed=s)
        write_boxqp(Q, c, d / f"b{s}.txt")
    return d


def test_relax_writes_model_and_sidecar(inst_dir, tmp_path, capsys):
    out = tmp_path / "m.lp"
    assert main(["relax", str(inst_dir / "b0.txt"), "--method", "tdnmdt", "--L", "2", "--out", str(out)]) == 0
    side = json.loads(out.with_suffix(".terms.json").read_text())
    assert side["L1"] == 3 and side["actual_counts"]["binaries"] == 6
    assert side["aux"]["1,2"] == "z0_1" and side["digits"]["1"]["beta"] == ["x0_b1", "x0_b2"]
    assert out.read_text().startswith("\\")


def test_relax_rejects_shallow_tightening(inst_dir):
    with pytest.raises(SystemExit) as err:
        main(["relax", str(inst_dir / "b0.txt"), "--method", "tdnmdt", "--L", "2", "--L1", "1"])
    assert err.value.code == 2
    with pytest.raises(SystemExit) as err:
        main(["relax", str(inst_dir / "b0.txt"), "--method", "nmdt", "--L", "2", "--L1", "1"])
    assert err.value.code == 2


def test_usage_errors(tmp_path):
    for argv in (["relax", str(tmp_path / "missing.txt"), "--method", "nmdt"],
                 ["relax", "x", "--method", "bogus"],
                 ["bench", "--instances", str(tmp_path / "none")],
                 ["report", "--runs", str(tmp_path / "none.csv")],
                 ["frobnicate"]):
        with pytest.raises(SystemExit) as err:
            main(argv)
        assert err.value.code != 0


def test_solve_instance_and_model(inst_dir, tmp_path, capsys):
    assert main(["solve", str(inst_dir / "b1.txt"), "--method", "dnmdt", "--L", "1"]) == 0
    out = capsys.readouterr().out
    assert "dual_bound" in out and "nodes" in out and "recovered" in out and "(feasible" in out
    model = tmp_path / "m.json"
    main(["relax", str(inst_dir / "b1.txt"), "--method", "dnmdt", "--L", "1", "--out", str(model)])
    capsys.readouterr()
    assert main(["solve", str(model)]) == 0
    out2 = capsys.readouterr().out
    dual = [ln for ln in out.splitlines() if ln.startswith("dual_bound")]
    assert dual == [ln for ln in out2.splitlines() if ln.startswith("dual_bound")]
    assert "recovered" not in out2


def test_analyze_row(capsys, monkeypatch):
    monkeypatch.setenv("QCRELAX_SEED", "7")
    assert main(["analyze", "--method", "dnmdt", "--L", "2", "--samples", "2000"]) == 0
    rows = list(csv.DictReader(capsys.readouterr().out.splitlines()))
    assert float(rows[0]["max_error_theory"]) == 0.015625
    main(["analyze", "--method", "dnmdt", "--L", "2", "--samples", "2000", "--seed", "7"])
    again = list(csv.DictReader(capsys.readouterr().out.splitlines()))
    assert again == rows


def test_bench_and_report(inst_dir, tmp_path):
    runs = tmp_path / "runs.csv"
    assert main(["bench", "--instances", str(inst_dir), "--methods", "mc,nmdt,tdnmdt", "--depths", "1,2",
                 "--out", str(runs), "--jobs", "2"]) == 0
    rows = read_rows(runs)
    assert len(rows) == 2 * (1 + 2 + 2)
    assert {r["status"] for r in rows} == {"Optimal"}
    again = tmp_path / "again.csv"
    main(["bench", "--instances", str(inst_dir), "--methods", "mc,nmdt,tdnmdt", "--depths", "1,2",
          "--out", str(again)])
    strip = lambda rs: [{k: v for k, v in r.items() if k != "wall_time"} for r in rs]  # noqa: E731
    assert strip(read_rows(again)) == strip(rows)
    assert main(["report", "--runs", str(runs), "--out-prefix", str(tmp_path / "rep")]) == 0
    prof = read_rows(tmp_path / "rep_profile.csv")
    sgm = read_rows(tmp_path / "rep_sgm.csv")
    assert {r["method"] for r in sgm} == {"mc", "nmdt-L1", "nmdt-L2", "tdnmdt-L1", "tdnmdt-L2"}
    assert all(float(r["fraction"]) <= 1.0 for r in prof)


SYNTH = """instance,method,L,L1,status,dual_bound,primal,gap,nodes,wall_time
i1,nmdt,1,,Optimal,10,10,0,1,1.0
i2,nmdt,1,,Optimal,4,4,0,1,2.0
i3,nmdt,1,,LimitReached,-2,5,1,9,30.0
i1,dnmdt,1,,Optimal,8,8,0,1,3.0
i2,dnmdt,1,,Optimal,4,4,0,1,4.0
i3,dnmdt,1,,Optimal,1,1,0,1,5.0
i4,dnmdt,1,,LimitReached,0,3,1,9,60.0
i4,nmdt,1,,LimitReached,0,3,1,9,60.0
"""


def test_report_oracle(tmp_path, capsys):
    runs = tmp_path / "s.csv"
    runs.write_text(SYNTH)
    table, sgm = summarize_runs(read_rows(runs))
    # i4 is unsolved by every method and dropped
    assert table.instances == ["i1", "i2", "i3"]
    assert table.P("nmdt-L1", 1.0) == 2 / 3 and table.P("dnmdt-L1", 1.0) == 2 / 3
    assert table.P("nmdt-L1", 4.0) == 1.0 and table.P("dnmdt-L1", 1.25) == 1.0
    by = {r["method"]: r for r in sgm}
    assert by["nmdt-L1"]["instances"] == 3
    assert by["nmdt-L1"]["shifted_geomean_time"] == pytest.approx((11 * 12 * 40) ** (1 / 3) - 10)
    assert main(["report", "--runs", str(runs)]) == 0
    prof = read_rows(tmp_path / "s_profile.csv")
    assert [(r["method"], float(r["tau"]), float(r["fraction"])) for r in prof] == [
        ("nmdt-L1", 1.0, 2 / 3), ("nmdt-L1", 4.0, 1.0), ("dnmdt-L1", 1.0, 2 / 3), ("dnmdt-L1", 1.25, 1.0)]
