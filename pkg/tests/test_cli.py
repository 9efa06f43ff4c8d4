import json

import pytest

from treemult.cli import main

SMALL = ["--trials", "4", "--random-symbols", "2"]


def run(args, capsys):
    code = main(args)
    out, err = capsys.readouterr()
    return code, out, err


def test_analyze_example(tmp_path, capsys):
    out = tmp_path / "r.json"
    code, _, _ = run(["analyze", "--symbol", "1/(1+n)", "--depth", "50", "--tol", "0.05",
                      "--out", str(out)], capsys)
    assert code == 0
    d = json.loads(out.read_text(encoding="utf-8"))
    r = d["report"]
    assert r["bounded"]["verdict"] == "yes" and r["norm"]["value"] == 1
    assert r["compact"]["verdict"] == "yes"
    assert r["bounded_below"]["verdict"] == "no"
    assert r["isometry"]["verdict"] == "no"
    assert d["resolved_config"]["tol"] == 0.05 and d["resolved_config"]["depth"] == 50


def test_analyze_isometry_and_declared_tail(capsys):
    code, out, _ = run(["analyze", "--symbol", "cis(n)"], capsys)
    assert code == 0 and json.loads(out)["report"]["isometry"]["verdict"] == "yes"
    code, out, _ = run(["analyze", "--symbol", "n", "--tail", "unbounded"], capsys)
    assert json.loads(out)["report"]["bounded"]["verdict"] == "no"


def test_config_file_precedence(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"symbol": "2^-n", "depth": 30, "operator": "L->Lmu"}),
                   encoding="utf-8")
    code, out, _ = run(["analyze", "--config", str(cfg), "--depth", "25"], capsys)
    d = json.loads(out)
    assert code == 0
    assert d["resolved_config"]["depth"] == 25
    assert d["resolved_config"]["operator"] == "L->Lmu"
    assert d["report"]["norm"]["interval"] == {"lo": 0.5, "hi": 1.0}


def test_spectrum_csv(capsys):
    code, out, _ = run(["spectrum", "--symbol", "5"], capsys)
    lines = out.splitlines()
    assert code == 0 and lines[0] == "re,im,count" and lines[1].startswith("5.0,0.0,")
    assert sum(1 for l in lines if not l.startswith("#")) == 2
    code, out, _ = run(["spectrum", "--symbol", "1/(1+n)", "--depth", "200", "--tol", "1e-2"],
                       capsys)
    rows = [l for l in out.splitlines()[1:] if not l.startswith("#")]
    assert len(rows) == 201
    assert "# 0.0,0.0" in out.splitlines()
    code, out, _ = run(["spectrum", "--symbol", "cis(n)", "--depth", "100"], capsys)
    rows = [l for l in out.splitlines()[1:] if not l.startswith("#")]
    assert len(rows) == 101


def test_spectrum_wrong_config(capsys):
    code, _, err = run(["spectrum", "--symbol", "1", "--operator", "L->Lmu"], capsys)
    assert code == 2 and "Lmu->Lmu" in err


def test_witness_tables(capsys):
    code, out, _ = run(["witness", "--symbol", "2^-n", "--depth", "30"], capsys)
    rows = [l.split(",") for l in out.splitlines()[1:] if not l.startswith("#")]
    assert code == 0 and {r[2] for r in rows} == {"1.0"}
    code, out, _ = run(["witness", "--symbol", "2^-n", "--depth", "60", "--operator", "L->Lmu"],
                       capsys)
    rows = [l.split(",") for l in out.splitlines()[1:] if not l.startswith("#")]
    assert {r[2] for r in rows} == {"2.0"}
    vals = [float(r[3]) for r in rows]
    assert vals[-1] < 1e-6 and all(b <= a for a, b in zip(vals, vals[1:]))
    assert "trend=consistent-with-compact" in out


def test_witness_anchor_beyond_truncation(capsys):
    code, _, err = run(["witness", "--symbol", "1", "--depth", "10", "--anchors", "3,99999"],
                       capsys)
    assert code == 2 and "outside" in err


@pytest.mark.parametrize("args", [
    ["analyze", "--symbol", "1/(1+"],
    ["analyze"],
    ["analyze", "--symbol", "1", "--tol", "-1"],
    ["analyze", "--symbol", "1", "--depth", "10", "--window", "20"],
    ["analyze", "--symbol", "1", "--operator", "L->L"],
    ["analyze", "--symbol", "1", "--tree", "file:/nonexistent/tree.txt"],
    ["analyze", "--symbol", "1", "--tree", "spiral:3"],
    ["analyze", "--symbol", "1", "--config", "/nonexistent.json"],
    ["bogus"],
])
def test_invalid_configs_exit_2(args, capsys):
    code, _, err = run(args, capsys)
    assert code == 2


def test_parse_error_reports_column(capsys):
    code, _, err = run(["analyze", "--symbol", "1/(1+"], capsys)
    assert "column 6" in err


def test_verify_small_and_inject(tmp_path, capsys):
    out = tmp_path / "v.json"
    csv_path = tmp_path / "v.csv"
    code, _, _ = run(["verify", *SMALL, "--out", str(out), "--csv", str(csv_path)], capsys)
    assert code == 0
    d = json.loads(out.read_text(encoding="utf-8"))
    assert d["passed"] and d["resolved_config"]["seed"] == 42
    assert csv_path.read_text(encoding="utf-8").startswith("config,symbol,verdict")
    code, _, err = run(["verify", *SMALL, "--inject-bug", "--out", str(tmp_path / "b.json"),
                        "--fixtures", str(tmp_path / "fx")], capsys)
    assert code == 1 and "fixture:" in err
    assert any((tmp_path / "fx").iterdir())


def test_verify_empty_symbols(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text('{"symbols": []}', encoding="utf-8")
    code, _, err = run(["verify", "--config", str(cfg)], capsys)
    assert code == 2 and "empty" in err


def test_no_partial_file_on_failure(tmp_path, capsys):
    out = tmp_path / "r.json"
    code, _, _ = run(["analyze", "--symbol", "log(n-5)", "--out", str(out)], capsys)
    assert code == 2 and not out.exists()
    assert list(tmp_path.iterdir()) == []


def test_determinism_small(tmp_path, capsys):
    out = tmp_path / "v.json"
    run(["verify", *SMALL, "--out", str(out)], capsys)
    first = out.read_bytes()
    run(["verify", *SMALL, "--out", str(out)], capsys)
    assert out.read_bytes() == first
