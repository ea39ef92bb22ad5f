import json

import pytest

from wdvv.cli import main

LINE_SCAN = ["scan", "--free", "c", "--n", "3", "--a", "-0.125", "--b", "0",
             "--grid-lo", "-2", "--grid-hi", "2", "--grid-steps", "9"]


def _json_out(capsys):
    return json.loads(capsys.readouterr().out)


def test_check_pass(capsys):
    assert main(["check", "--preset", "type-a-plus", "--n", "4", "--points", "2"]) == 0
    out = capsys.readouterr().out
    assert "PASS" in out
    assert "T2TypeA" in out
    assert "summary: pass=2 fail=0" in out


def test_check_fail(capsys):
    assert main(["check", "--preset", "bcd", "--eta", "0", "--n", "4", "--points", "2"]) == 1
    assert "FAIL" in capsys.readouterr().out


def test_check_inconclusive(capsys):
    argv = ["check", "--preset", "type-a-plus", "--n", "4", "--points", "2", "--tol", "1e-20"]
    assert main(argv) == 2
    assert "INCONCLUSIVE" in capsys.readouterr().out


def test_check_degenerate(capsys):
    argv = ["check", "--n", "4", "--a", "1", "--b", "-2", "--c", "8", "--points", "2"]
    assert main(argv) == 3
    out = capsys.readouterr().out
    assert "DEGENERATE" in out
    assert "T1DoublyDegenerate" in out


def test_usage_errors(capsys):
    bad = (["check", "--preset", "nope"],
           ["scan", "--n", "3"],
           ["check", "--preset", "bcd", "--kernel", "recip"],
           ["check", "--gamma", "1.0", "--n", "3"],
           ["theorem", "--id", "t9"],
           ["theorem", "--id", "t5", "--n", "2"],
           ["check", "--n", "1"],
           ["check", "--a", "xyz"],
           ["nonsense"])
    for argv in bad:
        assert main(argv) == 64, argv
        assert "usage error:" in capsys.readouterr().err


def test_json_schema(capsys):
    argv = ["check", "--preset", "type-a-plus", "--n", "3", "--points", "2",
            "--format", "json", "--deterministic"]
    assert main(argv) == 0
    doc = _json_out(capsys)
    assert set(doc) == {"version", "command", "params", "checks", "summary"}
    assert doc["command"] == "check"
    assert doc["params"]["n"] == 3
    assert doc["params"]["preset"] == "type-a-plus"
    assert len(doc["checks"]) == 2
    for entry in doc["checks"]:
        assert set(entry) == {"condition", "label", "point", "metric", "residual", "verdict"}
        assert entry["verdict"] == "pass"
    assert doc["summary"] == {"pass": 2, "fail": 0, "inconclusive": 0, "degenerate": 0}


def test_json_timestamp_toggle(capsys):
    argv = ["check", "--preset", "type-a-plus", "--n", "3", "--points", "1", "--format", "json"]
    main(argv)
    assert "generated_at" in _json_out(capsys)
    main(argv + ["--deterministic"])
    assert "generated_at" not in _json_out(capsys)


def test_csv_format(capsys):
    argv = ["check", "--preset", "type-a-plus", "--n", "3", "--points", "2", "--format", "csv"]
    assert main(argv) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "condition,label,point,metric,residual,verdict"
    assert len(lines) == 3


def test_out_file_deterministic(tmp_path, capsys):
    f1, f2 = tmp_path / "r1.json", tmp_path / "r2.json"
    base = ["check", "--preset", "bcd", "--eta", "-4", "--n", "4", "--points", "2",
            "--format", "json", "--deterministic"]
    assert main(base + ["--out", str(f1)]) == 0
    assert main(base + ["--out", str(f2)]) == 0
    capsys.readouterr()
    assert f1.read_bytes() == f2.read_bytes()
    doc = json.loads(f1.read_text())
    assert doc["summary"]["pass"] == 2


def test_theorem_commands(capsys):
    for tid in ("t1", "t2", "t3", "t4", "t5"):
        assert main(["theorem", "--id", tid, "--n", "4", "--deterministic"]) == 0, tid
        out = capsys.readouterr().out
        assert "theorem reproduced: yes" in out
        assert "PASS" in out


def test_theorem_json_cases(capsys):
    argv = ["theorem", "--id", "t3", "--n", "4", "--deterministic", "--format", "json"]
    assert main(argv) == 0
    doc = _json_out(capsys)
    assert doc["conditions"][0]["id"] == "T3BCD"
    assert doc["conditions"][0]["eta_star"] == -4.0
    assert all(case["matched"] for case in doc["cases"])
    expectations = {case["expected"] for case in doc["cases"]}
    assert expectations == {"pass", "not-pass"}


def test_identities_command(capsys):
    argv = ["identities", "--n", "4", "--points", "3", "--deterministic", "--format", "json"]
    assert main(argv) == 0
    doc = _json_out(capsys)
    conditions = {entry["condition"] for entry in doc["checks"]}
    assert {"kernel-three-term/coth", "kernel-three-term/recip", "slice-commutator",
            "metric-quadratic", "uv-product"} <= conditions
    assert all(entry["verdict"] == "pass" for entry in doc["checks"])


def test_scan_command(capsys):
    assert main(LINE_SCAN + ["--deterministic", "--format", "json"]) == 0
    doc = _json_out(capsys)
    hits = doc["scan"]["hits"]
    assert any(abs(hit["values"]["c"] - 1.0) < 1e-6 for hit in hits)
    assert doc["scan"]["points_tested"] == 18


def test_scan_no_hits_still_exit0(capsys):
    argv = ["scan", "--free", "b", "--n", "4", "--a", "0.3", "--c", "0.9",
            "--grid-lo", "2", "--grid-hi", "3", "--grid-steps", "3"]
    assert main(argv) == 0
    assert "no hits" in capsys.readouterr().out


def test_reduce_command(capsys):
    assert main(["reduce-a", "--n", "3", "--points", "2"]) == 0
    assert "PASS" in capsys.readouterr().out


def test_config_defaults_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n": 5, "preset": "type-a-plus", "points": 2}))
    argv = ["check", "--config", str(cfg), "--format", "json", "--deterministic"]
    assert main(argv) == 0
    doc = _json_out(capsys)
    assert doc["params"]["n"] == 5
    assert len(doc["checks"]) == 2
    # explicit flag beats the config value
    assert main(argv + ["--points", "1"]) == 0
    assert len(_json_out(capsys)["checks"]) == 1


def test_config_supplies_theorem_id(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"id": "t3", "n": "4"}))
    assert main(["theorem", "--config", str(cfg), "--deterministic", "--format", "json"]) == 0
    doc = _json_out(capsys)
    assert doc["params"]["n"] == 4
    assert doc["conditions"][0]["id"] == "T3BCD"


def test_config_rejects_unknown_keys(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"bogus": 1}))
    assert main(["check", "--config", str(cfg)]) == 64
    assert "usage error:" in capsys.readouterr().err
