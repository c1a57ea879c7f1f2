import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from sigma2est import cli, estimate, geomkit
from test_geomkit import dimple


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.main(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def write_json(tmp_path, obj, name="in.json"):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


# --- minsolve -----------------------------------------------------------------


@pytest.mark.parametrize(
    "problem, code, value",
    [
        ({"n": 2, "b": 1, "C": 2, "a": [1, 1]}, 0, 1.0),
        ({"n": 2, "b": 0, "C": 0, "a": [1, 1]}, 0, 0.0),
    ],
)
def test_minsolve_ok(tmp_path, problem, code, value):
    rc, out, _ = run("minsolve", "--input", write_json(tmp_path, problem))
    assert rc == code
    rec = json.loads(out)
    assert rec["value"] == pytest.approx(value, abs=1e-14)
    assert rec["class"] == "WellPosed"


def test_minsolve_unbounded(tmp_path):
    rc, out, _ = run("minsolve", "--input", write_json(tmp_path, {"n": 3, "b": 0, "C": 0, "a": [1, 0, 0]}))
    assert rc == 2
    assert json.loads(out) == {"discriminant": -1.0, "class": "Unbounded"}


def test_minsolve_errors(tmp_path):
    assert run("minsolve", "--input", str(tmp_path / "nope.json"))[0] == 66
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run("minsolve", "--input", str(bad))[0] == 64
    assert run("minsolve", "--input", write_json(tmp_path, {"n": 2, "b": 0, "C": 0, "a": [0, 0]}))[0] == 65
    assert run("minsolve", "--input", write_json(tmp_path, {"n": 2, "b": 0}))[0] == 65
    assert run("minsolve")[0] == 64


def test_usage_errors_exit_64(capsys):
    for argv in ([], ["frobnicate"], ["verify", "--trials", "x"]):
        with pytest.raises(SystemExit) as exc:
            cli.main(argv)
        assert exc.value.code == 64


def test_minsolve_output_file_round_trip(tmp_path):
    dest = tmp_path / "out.json"
    rc, out, _ = run("minsolve", "--input", write_json(tmp_path, {"n": 3, "b": 1, "C": 0, "a": [2, 2, 1]}),
                     "--output", str(dest))
    assert rc == 0 and out == ""
    rec = json.loads(dest.read_text())
    assert rec["value"] == pytest.approx(-1 / 7, abs=1e-15)
    np.testing.assert_allclose(rec["x"], [-1 / 7, -1 / 7, 4 / 7], atol=1e-15)


# --- verify -----------------------------------------------------------------------


def test_verify_one_trial():
    rc, out, _ = run("verify", "--seed", "0", "--trials", "1")
    rec = json.loads(out)
    assert rc == 0 and rec["trials"] == 1 and rec["ok"]


def test_verify_seed42(tmp_path):
    dest = tmp_path / "summary.json"
    rc, _, _ = run("verify", "--seed", "42", "--trials", "1000", "--output", str(dest))
    assert rc == 0
    rec = json.loads(dest.read_text())
    assert rec["max_value_disagreement"] <= 1e-9
    assert rec["lower_bound_violations"] == 0
    # round trip through the emitter is stable
    assert json.loads(json.dumps(rec)) == rec


def test_verify_deterministic():
    assert run("verify", "--seed", "3", "--trials", "20")[1] == run("verify", "--seed", "3", "--trials", "20")[1]


def test_verify_rejects_zero_trials():
    assert run("verify", "--trials", "0")[0] == 64


# --- symcheck --------------------------------------------------------------------


def test_symcheck_fixture(tmp_path):
    rc, out, _ = run("symcheck", "--trials", "1", "--input", write_json(tmp_path, {"lambda": [1, 1, 1]}))
    rec = json.loads(out)
    assert rc == 0
    assert rec["worst"] <= 1e-14


def test_symcheck_random():
    rc, out, _ = run("symcheck", "--seed", "7", "--trials", "200")
    assert rc == 0 and json.loads(out)["worst"] <= 1e-10


def test_symcheck_zero_trials():
    assert run("symcheck", "--trials", "0")[0] == 64


def test_symcheck_bad_fixture(tmp_path):
    assert run("symcheck", "--input", write_json(tmp_path, [1, 2, 3]))[0] == 65


# --- surface ----------------------------------------------------------------------


def test_surface_unit_sphere(tmp_path):
    dest = tmp_path / "samples.csv"
    spec = write_json(tmp_path, {"kind": "ellipsoid", "axes": [1, 1, 1], "n_theta": 8, "n_phi": 16})
    rc, out, _ = run("surface", "--input", spec, "--alpha", "1", "--output", str(dest))
    rep = json.loads(out)
    assert rc == 0
    assert rep["delta"] == pytest.approx(1, abs=1e-12)
    assert rep["sup_kappa"] == pytest.approx(1, abs=1e-12)
    rows = list(csv.DictReader(dest.open()))
    assert len(rows) == 128
    assert all(float(r["phi_value"]) == pytest.approx(1, abs=1e-12) for r in rows)


def test_surface_sphere_r2_csv_to_stdout(tmp_path):
    spec = write_json(tmp_path, {"kind": "ellipsoid", "axes": [2, 2, 2], "n_theta": 8, "n_phi": 16})
    rc, out, err = run("surface", "--input", spec, "--format", "csv")
    assert rc == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert all(float(r["phi_value"]) == pytest.approx(1 / 8, abs=1e-12) for r in rows)
    assert json.loads(err)["sup_kappa"] == pytest.approx(0.5, abs=1e-12)


def test_surface_dimple_exit_2(tmp_path):
    grid = geomkit.RadialGrid.from_function(dimple(), 32, 64)
    spec = write_json(tmp_path, {"kind": "radial_grid", "n_theta": 32, "n_phi": 64, "rho": grid.rho.tolist()})
    dest = tmp_path / "samples.csv"
    rc, out, _ = run("surface", "--input", spec, "--output", str(dest))
    rep = json.loads(out)
    assert rc == 2
    assert rep["two_convex"] is False and rep["min_sigma2"] < 0
    assert next(csv.DictReader(dest.open()))["phi_value"] == "NaN"


def test_surface_invalid_spec(tmp_path):
    spec = write_json(tmp_path, {"kind": "radial_grid", "n_theta": 8, "n_phi": 16, "rho": (-np.ones((8, 16))).tolist()})
    assert run("surface", "--input", spec)[0] == 65
    assert run("surface", "--input", write_json(tmp_path, {"kind": "ellipsoid", "axes": [1, 1]}))[0] == 65


# --- explore ----------------------------------------------------------------------


@pytest.mark.parametrize("b, value", [(0, 0.0), (1, 4 / 3)])
def test_explore_fixture(tmp_path, b, value):
    fix = write_json(tmp_path, {"lambda": [1, 1, 1, 1], "b": b, "C": 0})
    rc, out, _ = run("explore", "--n", "4", "--k", "3", "--input", fix)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rc == 0 and len(rows) == 1
    assert float(rows[0]["value"]) == pytest.approx(value, abs=1e-10)
    assert rows[0]["class"] == "WellPosed"


def test_explore_k2_sweep_matches_bound():
    rc, out, _ = run("explore", "--n", "3", "--k", "2", "--trials", "25", "--seed", "11", "--format", "json")
    assert rc == 0
    rows = json.loads(out)
    assert len(rows) == 25
    for r in rows:
        lam = [r["lambda_1"], r["lambda_2"], r["lambda_3"]]
        bound = estimate.remark42_bound(lam, r["b"], r["C"])
        assert abs(r["value"] - bound) <= 1e-10 * (1 + abs(bound))


def test_explore_k_greater_than_n():
    assert run("explore", "--n", "3", "--k", "4")[0] == 64


def test_explore_fixture_outside_cone(tmp_path):
    fix = write_json(tmp_path, {"lambda": [1, 1, -0.9, 0.1], "b": 0, "C": 0})
    assert run("explore", "--n", "4", "--k", "3", "--input", fix)[0] == 65


def test_module_entry_point(tmp_path):
    spec = write_json(tmp_path, {"n": 2, "b": 1, "C": 2, "a": [1, 1]})
    proc = subprocess.run([sys.executable, "-m", "sigma2est", "minsolve", "--input", spec],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["value"] == 1.0
