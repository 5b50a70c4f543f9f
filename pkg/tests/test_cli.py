import csv
import io
import json
import statistics
import subprocess
import sys

import highspy
import pytest

from pathoblivious.cli import main


def write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


CYCLE = {"topology": {"kind": "cycle", "nodes": 8}, "consumer_count": 5, "request_count": 25, "seed": 1}
LINE = {"topology": {"kind": "line", "nodes": 3}, "consumers": [[0, 2]], "request_count": 5,
        "lp": {"demand_rate": 10}}


def test_run_prints_header_and_row(tmp_path, capsys):
    assert main(["run", "--config", write(tmp_path / "c.json", CYCLE)]) == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert len(rows) == 1
    assert rows[0]["topology"] == "cycle" and rows[0]["complete"] == "1"


def test_run_repeat_identical(tmp_path, capsys):
    path = write(tmp_path / "c.json", CYCLE)
    main(["run", "--config", path])
    first = capsys.readouterr().out
    main(["run", "--config", path])
    assert capsys.readouterr().out == first


def test_seed_override(tmp_path, capsys):
    path = write(tmp_path / "c.json", CYCLE)
    main(["--seed", "77", "run", "--config", path])
    row = next(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert row["seed"] == "77"


def test_config_error_exit(tmp_path, capsys):
    bad = dict(CYCLE, consumer_count=29)
    assert main(["run", "--config", write(tmp_path / "c.json", bad)]) == 2
    assert "consumer_count" in capsys.readouterr().err


def test_malformed_json_exit(tmp_path, capsys):
    path = tmp_path / "c.json"
    path.write_text("{")
    assert main(["run", "--config", str(path)]) == 2
    assert capsys.readouterr().err.startswith("error:")


def test_incomplete_exit(tmp_path, capsys):
    cfg = dict(CYCLE, max_ticks=2, request_count=400)
    assert main(["run", "--config", write(tmp_path / "c.json", cfg)]) == 3
    row = next(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert row["complete"] == "0"


def test_missing_file_exit(tmp_path):
    assert main(["run", "--config", str(tmp_path / "nope.json")]) == 4


def sweep_spec(tmp_path, **kw):
    spec = {"base": CYCLE, "axis": "distill", "values": [1, 2, 3], "seeds": [0, 1, 2]}
    spec.update(kw)
    return write(tmp_path / "s.json", spec)


def test_sweep_rows_and_aggregates(tmp_path):
    out = tmp_path / "out.csv"
    assert main(["sweep", "--spec", sweep_spec(tmp_path), "--out", str(out)]) == 0
    rows = list(csv.DictReader(out.open()))
    runs = [r for r in rows if r["kind"] == "run"]
    aggs = [r for r in rows if r["kind"] == "aggregate"]
    assert len(runs) == 9 and len(aggs) == 3
    assert [(r["value"], r["seed"]) for r in runs] == [(str(v), str(s)) for v in (1, 2, 3) for s in (0, 1, 2)]
    for agg in aggs:
        values = [float(r["overhead"]) for r in runs if r["value"] == agg["value"]]
        assert float(agg["overhead_mean"]) == statistics.mean(values)
        assert float(agg["overhead_stddev"]) == statistics.stdev(values)


def test_sweep_workers_same_bytes(tmp_path):
    spec = sweep_spec(tmp_path, values=[1, 2], seeds=[4, 5])
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["sweep", "--spec", spec, "--out", str(a)])
    main(["sweep", "--spec", spec, "--out", str(b), "--workers", "2"])
    assert a.read_bytes() == b.read_bytes()


def test_sweep_grid_nodes(tmp_path, capsys):
    base = {"topology": {"kind": "grid", "side": 3}, "consumer_count": 5, "request_count": 15}
    out = tmp_path / "g.csv"
    assert main(["sweep", "--spec", sweep_spec(tmp_path, base=base, axis="nodes", values=[9, 16], seeds=[0]),
                 "--out", str(out)]) == 0
    assert [r["nodes"] for r in csv.DictReader(out.open()) if r["kind"] == "run"] == ["9", "16"]
    assert main(["sweep", "--spec", sweep_spec(tmp_path, base=base, axis="nodes", values=[9, 12], seeds=[0]),
                 "--out", str(out)]) == 2
    assert "perfect square" in capsys.readouterr().err


def test_sweep_unwritable(tmp_path):
    assert main(["sweep", "--spec", sweep_spec(tmp_path, values=[1], seeds=[0]),
                 "--out", str(tmp_path / "missing" / "out.csv")]) == 4


def test_lp_max_c(tmp_path, capsys):
    assert main(["lp", "--config", write(tmp_path / "l.json", LINE), "--objective", "max-c"]) == 0
    rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
    assert rows[0] == ["block", "variable", "value"]
    assert ["solution", "status", "optimal"] in rows
    assert ["solution", "objective", "1"] in rows


def test_lp_lex_blocks_and_exports(tmp_path, capsys):
    export = tmp_path / "m.lp"
    assert main(["lp", "--config", write(tmp_path / "l.json", LINE), "--objective", "lex",
                 "--export", str(export)]) == 0
    rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
    assert {r[0] for r in rows[1:]} == {"phase1", "phase2"}
    assert ["phase2", "objective", "2"] in rows
    assert (tmp_path / "m.phase2.lp").exists()


def test_lp_infeasible_is_success(tmp_path, capsys):
    cfg = dict(LINE, lp={"generation": "variable", "demand": [{"pair": [0, 2], "rate": 10}]})
    assert main(["lp", "--config", write(tmp_path / "l.json", cfg), "--objective", "min-g"]) == 0
    assert "solution,status,infeasible" in capsys.readouterr().out


def test_lp_export_reads_in_highs(tmp_path):
    export = tmp_path / "m.lp"
    out = tmp_path / "sol.csv"
    main(["lp", "--config", write(tmp_path / "l.json", LINE), "--objective", "max-c",
          "--export", str(export), "--out", str(out)])
    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    assert h.readModel(str(export)) == highspy.HighsStatus.kOk
    h.run()
    assert h.getInfo().objective_function_value == pytest.approx(1)
    assert "objective,1" in out.read_text()


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "pathoblivious", "run", "--config",
                           write(tmp_path / "c.json", CYCLE)], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("topology,")
