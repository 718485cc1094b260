import json
import math
import xml.etree.ElementTree as ET
from pathlib import Path

import pytest

from sharplog.cli import main
from sharplog.report import (Series, atomic_write_text, canonical_json, config_hash, csv_text, format_cell,
                             output_root, svg_plot)


def _one_dir(root: Path, prefix: str) -> Path:
    hits = sorted(p for p in root.iterdir() if p.name.startswith(prefix))
    assert len(hits) == 1, hits
    return hits[0]


def test_scan_writes_artifacts(tmp_path, capsys):
    assert main(["scan", "--alpha", "0.5", "--output", str(tmp_path)]) == 0
    d = _one_dir(tmp_path, "scan-")
    assert (d / "scan.csv").read_text().splitlines()[0] == "x,D,g,F,H"
    rec = json.loads((d / "record.json").read_text())
    assert rec["config"]["alpha"] == 0.5 and rec["config_hash"] in d.name
    assert "wall_time" not in rec
    assert "wall_time" in json.loads((d / "timing.json").read_text())
    assert "[PASS]" in capsys.readouterr().out


def test_format_selection(tmp_path):
    assert main(["scan", "--output", str(tmp_path), "--format", "json"]) == 0
    d = _one_dir(tmp_path, "scan-")
    assert not list(d.glob("*.csv")) and not list(d.glob("*.svg"))
    assert (d / "results.json").exists()


@pytest.mark.parametrize("argv,flag", [
    (["scan", "--alpha", "1.5"], "--alpha"),
    (["minimizer", "--x", "0.25", "--D", "3"], "--D"),
    (["global", "--mu", "2"], "--mu"),
    (["scan", "--tol", "bogus=1"], "--tol"),
    (["scan", "--tol", "energy_rel"], "--tol"),
    (["extremal", "--eps", "0.9"], "--eps"),
])
def test_usage_errors(tmp_path, capsys, argv, flag):
    assert main(argv + ["--output", str(tmp_path)]) == 2
    assert flag in capsys.readouterr().err
    assert not any(tmp_path.iterdir())


def test_unknown_flag_is_usage_error(capsys):
    assert main(["scan", "--nope", "1"]) == 2


def test_output_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("SHARPLOG_OUTPUT", str(tmp_path / "env"))
    assert output_root(None) == tmp_path / "env"
    assert output_root(str(tmp_path / "x")) == tmp_path / "x"
    monkeypatch.delenv("SHARPLOG_OUTPUT")
    assert output_root(None) == Path("sharplog-out")


def _suite(tmp_path, items) -> str:
    p = tmp_path / "suite.json"
    p.write_text(json.dumps(items))
    return str(p)


def test_empty_suite(tmp_path, capsys):
    assert main(["report-all", "--suite", _suite(tmp_path, []), "--output", str(tmp_path / "o")]) == 0
    assert "(empty suite)" in capsys.readouterr().out


def test_bad_suite_item(tmp_path, capsys):
    s = _suite(tmp_path, [{"command": "minimizer", "eps": 1e-3}])
    assert main(["report-all", "--suite", s, "--output", str(tmp_path / "o")]) == 2
    assert "--suite" in capsys.readouterr().err


def test_fault_injection_is_localized(tmp_path, capsys):
    s = _suite(tmp_path, [{"command": "minimizer", "alpha": 0.5, "x": 0.25, "tol": {"energy_rel": 0}},
                          {"command": "scan", "alpha": 0.5}])
    out = tmp_path / "o"
    assert main(["report-all", "--suite", s, "--output", str(out), "--jobs", "1"]) == 1
    summary = json.loads(_one_dir(out, "report-all-").joinpath("summary.json").read_text())
    bad = [e for e in summary["experiments"] if not e["passed"]]
    assert len(bad) == 1 and bad[0]["command"] == "minimizer"
    assert bad[0]["failed"] == ["energy_identity"]
    claims = {c["claim"]: c for c in summary["claims"]}
    assert claims["closed-form minimizer"]["status"] == "FAIL"
    assert "FAIL energy_identity" in capsys.readouterr().out


def test_rerun_is_byte_identical(tmp_path):
    s = _suite(tmp_path, [{"command": "minimizer", "alpha": 0.3, "x": 0.04}, {"command": "sharpness"}])
    a, b = tmp_path / "a", tmp_path / "b"
    for root in (a, b):
        assert main(["report-all", "--suite", s, "--output", str(root)]) == 0
    files = sorted(p.relative_to(a) for p in a.rglob("*") if p.is_file() and p.name != "timing.json")
    assert files
    for f in files:
        assert (a / f).read_bytes() == (b / f).read_bytes(), f


def test_config_hash_ignores_key_order():
    assert config_hash({"a": 1, "b": [1, 2]}) == config_hash({"b": [1, 2], "a": 1})
    assert config_hash({"a": 1}) != config_hash({"a": 2})
    assert canonical_json({"b": 1, "a": 2}).index('"a"') < canonical_json({"b": 1, "a": 2}).index('"b"')


def test_atomic_write(tmp_path):
    p = tmp_path / "deep" / "f.txt"
    atomic_write_text(p, "one")
    atomic_write_text(p, "two")
    assert p.read_text() == "two"
    assert [q.name for q in p.parent.iterdir()] == ["f.txt"]


def test_csv_cells_round_trip():
    assert float(format_cell(0.1)) == 0.1
    assert float(format_cell(math.pi)) == math.pi
    assert format_cell(True) == "true" and format_cell(float("nan")) == "nan"
    text = csv_text(["a", "b"], [[1, 2.5], {"a": 3, "b": 4}])
    assert text.splitlines() == ["a,b", "1,2.5", "3,4"]


def test_svg_is_well_formed():
    svg = svg_plot([Series("s <1>", [1, 10, 100], [0.0, 1.0, 4.0]), Series("t", [1, 100], [2, 2], True)],
                   "title & more", "x", "y", logx=True)
    root = ET.fromstring(svg)
    assert root.tag.endswith("svg")
