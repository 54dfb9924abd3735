from __future__ import annotations

import csv
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from lcbound import cli


def run(args, capsys):
    code = cli.main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_certify_all_json(tmp_path, capsys):
    out = tmp_path / "cert.json"
    code, _, _ = run(["certify", "--select", "all", "--format", "json", "--out", str(out)], capsys)
    assert code == 0
    data = json.loads(out.read_text())
    assert data["passed"] and len(data["certificates"]) == 7
    assert (tmp_path / "cert.json.manifest.json").exists()


def test_certify_single_and_bogus(capsys):
    code, out, _ = run(["certify", "--select", "d4", "-v"], capsys)
    assert code == 0 and "c >= 4" in out
    code, _, err = run(["certify", "--select", "bogus"], capsys)
    assert code == 2 and "bogus" in err


def test_certify_with_weaker_constant_fails(capsys):
    code, out, _ = run(["certify", "--select", "d4", "--c", "39/10"], capsys)
    assert code == 1 and "FAIL" in out


def test_bounds_examples(capsys):
    code, out, _ = run(["bounds", "--delta", "1"], capsys)
    assert code == 0
    assert "p = 25/9342 (0.00267608649112)" in out and "p1 = 1/72" in out
    code, out, _ = run(["bounds", "--delta", "6"], capsys)
    assert "p1 = 176/2187" in out
    code, out, _ = run(["bounds", "--delta", "1", "--u", "0.25", "--format", "json"], capsys)
    data = json.loads(out)
    assert data["values"]["p_u"]["exact"] == "1/288"


@pytest.mark.parametrize("args", [
    ["bounds", "--delta", "0"],
    ["bounds", "--delta", "x"],
    ["bounds", "--delta", "1", "--u", "2"],
    ["bounds"],
    ["nonsense"],
])
def test_bounds_usage_errors(args, capsys):
    assert run(args, capsys)[0] == 2


def test_dist_examples(tmp_path, capsys):
    out = tmp_path / "expo.csv"
    code, _, _ = run(["dist", "--family", "exponential", "--grid", "0.1:8:0.1", "--out", str(out)], capsys)
    assert code == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 80 and all(float(r["margin"]) > 0 for r in rows)
    code, _, _ = run(["dist", "--family", "all", "--format", "json"], capsys)
    assert code == 0
    assert run(["dist", "--family", "cauchy"], capsys)[0] == 2


def test_conjecture_config_errors(capsys):
    assert run(["conjecture", "--delta", "1", "--knots", "4"], capsys)[0] == 2
    assert run(["conjecture", "--support", "3"], capsys)[0] == 2


def _write_density(path, knots, phi, delta=1.0):
    path.write_text(json.dumps({"config": {"delta": delta},
                                "density": {"knots": list(knots), "phi": list(phi)}}))


def test_conjecture_load_fixtures(tmp_path, capsys):
    knots = np.linspace(-10, 10, 65)
    expo = tmp_path / "expo.json"
    _write_density(expo, knots, -(knots + 10))
    code, out, err = run(["conjecture", "--load", str(expo)], capsys)
    assert code == 0 and "consistent" in err
    assert abs(json.loads(out)["comparison"]["gap"]) < 1e-6
    # exponential cut off at 5: below the conjectured value
    cut = tmp_path / "cut.json"
    k = np.linspace(0, 5, 65)
    _write_density(cut, k, -k)
    code, _, err = run(["conjecture", "--load", str(cut)], capsys)
    assert code == 3 and "counterexample candidate" in err


def test_conjecture_small_run_is_reproducible(tmp_path, capsys):
    out = tmp_path / "cj.json"
    args = ["conjecture", "--delta", "1", "--knots", "16", "--restarts", "2", "--seed", "5", "--out", str(out)]
    code, _, _ = run(args, capsys)
    assert code in (0, 3)
    again = tmp_path / "again.json"
    assert run(["replay", str(out) + ".manifest.json", "--out", str(again)], capsys)[0] == code
    assert out.read_bytes() == again.read_bytes()


def test_curve_examples(tmp_path, capsys):
    out = tmp_path / "curve.csv"
    assert run(["curve", "--range", "0.01:10:0.01", "--out", str(out)], capsys)[0] == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 1000
    for r in rows:
        assert float(r["p"]) <= float(r["p1"]) and float(r["p"]) <= float(r["conjectured"])
    code, text, _ = run(["curve", "--range", "16/3:16/3:1"], capsys)
    assert text.splitlines()[1].split(",")[-1] == "2/27"
    code, text, _ = run(["curve", "--range", "2:1:1"], capsys)
    assert text == "delta,p,p1,conjectured,p_exact,p1_exact\n"


@pytest.mark.parametrize("args,name", [
    (["certify", "--select", "all", "--format", "json"], "certify.json"),
    (["bounds", "--delta", "16/3", "--u", "1/10", "--b", "1/7"], "bounds.text"),
    (["curve", "--range", "1/10:3:1/10"], "curve.csv"),
])
def test_replay_is_byte_identical(args, name, tmp_path, monkeypatch, capsys):
    monkeypatch.setenv(cli.OUT_DIR_ENV, str(tmp_path))
    assert run(args, capsys)[0] == 0
    first = tmp_path / name
    manifest = json.loads((tmp_path / (name + ".manifest.json")).read_text())
    assert manifest["subcommand"] == args[0] and manifest["outputs"] == [name]
    second = tmp_path / ("re-" + name)
    assert run(["replay", str(tmp_path / (name + ".manifest.json")), "--out", str(second)], capsys)[0] == 0
    assert first.read_bytes() == second.read_bytes()


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "lcbound", "bounds", "--delta", "1"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "25/9342" in proc.stdout


def test_grid_parser():
    from fractions import Fraction

    assert cli.parse_grid("1:2:1/2") == [1, Fraction(3, 2), 2]
    assert cli.parse_grid("3") == [3]
    with pytest.raises(cli.UsageError):
        cli.parse_grid("1:2")
    assert math.isclose(float(cli.parse_grid("0.1:8:0.1")[-1]), 8.0)
