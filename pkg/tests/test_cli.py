import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from laxpi.cli import main

from conftest import rodrigues


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_eval_zero_curve(capsys):
    for m in ("riemann", "rk4", "bcdh-log"):
        code, out, _ = run(capsys, "eval", "--spec", "zero_so3", "--method", m)
        assert code == 0
        assert np.array_equal(np.array(json.loads(out)["matrix"]), np.eye(3))


def test_eval_riemann_rotation(capsys):
    code, out, _ = run(capsys, "eval", "--spec", "so3_const_l3", "--method", "riemann", "--n", "4096")
    assert code == 0
    doc = json.loads(out)
    a, b = doc["interval"]
    assert np.max(np.abs(np.array(doc["matrix"]) - rodrigues([0, 0, 1], b - a))) < 1e-3


def test_eval_nilpotent_log(capsys):
    code, out, _ = run(capsys, "eval", "--spec", "heis_p2tq", "--method", "nilpotent-log")
    assert code == 0
    doc = json.loads(out)
    assert doc["basis"] == ["P", "Q", "Z"]
    assert np.allclose(doc["log_coords"], [1, 1, -1 / 6], atol=1e-12)


def test_eval_csv_round_trips(capsys, tmp_path):
    out = tmp_path / "e.csv"
    assert main(["eval", "--spec", "so3_test", "--format", "csv", "--out", str(out)]) == 0
    rows = dict(csv.reader(io.StringIO(out.read_text())))
    code, js, _ = run(capsys, "eval", "--spec", "so3_test")
    M = np.array(json.loads(js)["matrix"])
    assert float(rows["matrix[0][1]"]) == M[0, 1]


def test_compare_zero(capsys):
    code, out, _ = run(capsys, "compare", "--spec", "zero_so3")
    assert code == 0
    doc = json.loads(out)
    assert {(d["method_a"], d["method_b"]) for d in doc} >= {("riemann", "rk4")}
    assert all(d["frobenius_deviation"] == 0 for d in doc)


def test_compare_so3_literal_bound(capsys):
    # riemann(4096) is first order; its deviation from the others is ~6e-5
    code, out, _ = run(capsys, "compare", "--spec", "so3_test")
    doc = json.loads(out)
    assert len(doc) == 3
    assert all(d["frobenius_deviation"] < 1e-5 for d in doc)


def test_compare_heisenberg_literal_bound(capsys):
    code, out, _ = run(capsys, "compare", "--spec", "heis_p2tq")
    doc = json.loads(out)
    pair = [d for d in doc if {d["method_a"], d["method_b"]} == {"riemann", "nilpotent-log"}][0]
    assert pair["frobenius_deviation"] < 1e-6


def test_compare_high_order_methods_agree(capsys):
    for spec, methods in (("so3_test", {"rk4", "bcdh-log"}), ("heis_p2tq", {"rk4", "nilpotent-log"})):
        code, out, _ = run(capsys, "compare", "--spec", spec)
        doc = json.loads(out)
        pair = [d for d in doc if {d["method_a"], d["method_b"]} == methods][0]
        assert pair["frobenius_deviation"] < 1e-10


def test_compare_deterministic_csv(capsys, monkeypatch):
    monkeypatch.setenv("LAXPI_THREADS", "3")
    _, a, _ = run(capsys, "compare", "--spec", "so3_test", "--format", "csv", "--no-timing")
    monkeypatch.setenv("LAXPI_THREADS", "1")
    _, b, _ = run(capsys, "compare", "--spec", "so3_test", "--format", "csv", "--no-timing")
    assert a == b
    assert a.splitlines()[0] == "method_a,method_b,frobenius_deviation,wall_time_ms"


@pytest.mark.parametrize("suite", ["lax", "group", "transform", "identities", "bcdh"])
def test_check_suites_pass(capsys, suite):
    code, out, _ = run(capsys, "check", suite)
    doc = json.loads(out)
    assert code == 0 and doc["pass"], doc


def test_check_lax_zero_curve(capsys):
    code, out, _ = run(capsys, "check", "lax", "--spec", "zero_so3")
    doc = json.loads(out)
    assert code == 0
    # exact zeros except the coordinate projection in matrix_consistency
    assert all(c["value"] <= 1e-15 for c in doc["checks"])


def test_check_csv_deterministic(capsys):
    _, a, _ = run(capsys, "check", "group", "--format", "csv", "--seed", "7")
    _, b, _ = run(capsys, "check", "group", "--format", "csv", "--seed", "7")
    assert a == b
    assert "associativity" in a


def test_check_failure_exit_code(capsys, monkeypatch):
    from laxpi import checks
    monkeypatch.setattr(checks, "lax_suite", lambda *a, **k: [checks.Check("x", 1.0, 0.5)])
    code, out, _ = run(capsys, "check", "lax")
    assert code == 1
    assert json.loads(out)["pass"] is False


def test_bcdh_command(capsys, tmp_path):
    spec = {"algebra": "heis3", "interval": [0, 1], "grid_n": 32}
    p = tmp_path / "p.json"
    q = tmp_path / "q.json"
    p.write_text(json.dumps({**spec, "terms": [{"basis": "P", "poly": [1.0]}]}))
    q.write_text(json.dumps({**spec, "terms": [{"basis": "Q", "poly": [1.0]}]}))
    code, out, _ = run(capsys, "bcdh", "--spec", str(p), "--spec", str(q))
    assert code == 0
    assert np.allclose(json.loads(out)["log_coords"], [1, 1, 0.5], atol=1e-14)


def test_errors(capsys):
    code, _, err = run(capsys, "eval", "--spec", "no_such_spec")
    assert code == 2 and "error" in err
    with pytest.raises(SystemExit):
        main(["eval"])
    with pytest.raises(SystemExit):
        main(["eval", "--spec", "so3_test", "--tol", "-1"])
    code, _, err = run(capsys, "eval", "--spec", "so3_test", "--method", "nilpotent-log")
    assert code == 2


def test_console_script():
    res = subprocess.run([sys.executable, "-m", "laxpi.cli", "eval", "--spec", "zero_so3"],
                         capture_output=True, text=True, check=True)
    assert json.loads(res.stdout)["method"] == "rk4"
