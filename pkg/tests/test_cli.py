import csv
import io
import json
import os
import subprocess
import sys

import numpy as np

from conftest import DATA


def run(*args, env=None):
    full = dict(os.environ, **(env or {}))
    return subprocess.run([sys.executable, "-m", "crext", *map(str, args)],
                          capture_output=True, text=True, env=full, timeout=300)


def test_analyze_reports_verdicts():
    out = run("analyze", "--model", DATA / "split.json")
    assert out.returncode == 0, out.stderr
    rep = json.loads(out.stdout)
    assert rep["verdict"]["verdict"] == "Inconclusive"
    assert rep["inertia_real_form"] == {"positive": 2, "negative": 2, "zero": 0}
    assert rep["parabolic_flags"] is None
    rep = json.loads(run("analyze", "--model", DATA / "one_negative.json").stdout)
    assert rep["verdict"]["verdict"] == "ExtendsUp"
    rep = json.loads(run("analyze", "--model", DATA / "bishop.json").stdout)
    assert rep["bishop_invariants"] == [0.25] and rep["parabolic_flags"] == ["elliptic"]


def test_parse_and_schema_errors_exit_2(tmp_path):
    empty = tmp_path / "empty.json"
    empty.write_text("")
    out = run("analyze", "--model", empty)
    assert out.returncode == 2 and "PARSE_ERROR" in out.stderr
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"n": 2, "A": [[1, 0], [0, "x"]]}))
    out = run("analyze", "--model", bad)
    assert out.returncode == 2 and "A[1][1]" in out.stderr
    assert out.stdout == ""


def test_formal_extend(tmp_path):
    out = run("formal-extend", "--model", DATA / "one_negative.json",
              "--f", DATA / "one_negative_f.json", "--order", 4)
    assert out.returncode == 0, out.stderr
    rep = json.loads(out.stdout)
    assert rep["chain_identity_residual"] < 1e-12 and rep["residual_valuation"] >= 5
    out = run("formal-extend", "--model", DATA / "parabolic.json",
              "--f", DATA / "one_negative_f.json", "--order", 3)
    assert out.returncode in (2, 3)
    out = run("formal-extend", "--model", DATA / "split.json",
              "--f", DATA / "one_negative_f.json", "--order", 3)
    assert out.returncode != 0


def test_formal_extend_degenerate_model_exits_3(tmp_path):
    f = tmp_path / "f.json"
    f.write_text(json.dumps([{"z_exp": [1, 0], "zbar_exp": [0, 0], "coeff": 1}]))
    out = run("formal-extend", "--model", DATA / "parabolic.json", "--f", f, "--order", 3)
    assert out.returncode == 3 and "HYPOTHESIS" in out.stderr


def test_disc_csv(tmp_path):
    out = run("disc", "--model", DATA / "one_negative.json", "--point", DATA / "one_negative_point.json",
              "--nodes", 64)
    assert out.returncode == 0, out.stderr
    rows = list(csv.reader(io.StringIO(out.stdout)))
    assert rows[0] == ["angle", "re_z1", "im_z1", "re_z2", "im_z2", "re_z3", "im_z3", "residual"]
    assert len(rows) == 65
    assert max(float(r[-1]) for r in rows[1:]) < 1e-12


def test_extend_point_and_probe_path():
    out = run("extend-point", "--model", DATA / "one_negative.json",
              "--data", DATA / "one_negative_data.json", "--point", DATA / "one_negative_point.json")
    assert out.returncode == 0, out.stderr
    rep = json.loads(out.stdout)
    assert np.isclose(rep["value"][0], np.exp(-4) / 0.8, atol=1e-12)
    assert rep["chain"][0]["step"] == "disc"
    out = run("extend-point", "--model", DATA / "split.json",
              "--data", DATA / "split_data.json", "--probe-path", DATA / "split_probes.json")
    assert out.returncode == 0, out.stderr
    assert json.loads(out.stdout)["passed"]
    out = run("extend-point", "--model", DATA / "split.json", "--data", DATA / "split_data.json")
    assert out.returncode == 2


def test_extend_point_forbidden_side_exits_3(tmp_path):
    p = tmp_path / "p.json"
    p.write_text(json.dumps({"z": [0.1, 0.05, 0.1], "s": -0.5}))
    out = run("extend-point", "--model", DATA / "one_negative.json",
              "--data", DATA / "one_negative_data.json", "--point", p)
    assert out.returncode == 3 and "VERDICT_FORBIDS" in out.stderr


def test_leaf_topology(tmp_path):
    cells = tmp_path / "cells.csv"
    out = run("leaf-topology", "--model", DATA / "hyperbolic_pair.json", "--s", 0.5,
              "--resolution", 32, "--csv", cells)
    assert out.returncode == 0, out.stderr
    rep = json.loads(out.stdout)
    # one positive direction: outside the classifier's hypotheses, the grid still counts
    assert rep["classification"]["error"] == "HYPOTHESIS_FAIL" and "agree" not in rep
    assert rep["oracle"]["boundary_components"] == 2
    assert cells.read_text().splitlines()[0] == "x1,x2,x3,x4"
    assert run("leaf-topology", "--model", DATA / "split.json", "--s", 1, "--resolution", 9).returncode == 2


def test_leaf_topology_budget_exceeded_exits_4(tmp_path):
    m = tmp_path / "m.json"
    m.write_text(json.dumps({"n": 5, "A": np.eye(5).tolist()}))
    out = run("leaf-topology", "--model", m, "--s", 1)
    assert out.returncode == 4 and "GRID_BUDGET_EXCEEDED" in out.stderr


def test_verify_examples_subset():
    out = run("verify-examples", "--only", "8.3")
    assert out.returncode == 0, out.stderr
    rep = json.loads(out.stdout)
    assert rep["total"] == 1 and rep["passed"] == 1
    assert run("verify-examples", "--only", "0.0").returncode == 2


def test_output_is_deterministic_and_seed_is_read_from_env():
    args = ("extend-point", "--model", DATA / "one_negative.json",
            "--data", DATA / "one_negative_data.json", "--point", DATA / "one_negative_point.json")
    a, b = run(*args), run(*args)
    assert a.stdout == b.stdout
    out = run("-v", *args, env={"CREXT_SEED": "7"})
    assert "seed 7" in out.stderr
    out = run("-v", "--seed", "3", *args, env={"CREXT_SEED": "7"})
    assert "seed 3" in out.stderr
