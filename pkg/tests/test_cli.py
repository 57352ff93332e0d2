import csv
import io
import json
import subprocess
import sys

import jsonschema
import pytest

from qortho.cli import main, report_schema


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def test_eval_little0jacobi_csv():
    code, out, _ = run("eval", "--family", "little0jacobi", "--a", "1/2", "--b", "1/4", "--n-max", "2", "--x-max", "2", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 9
    assert {"n": "1", "x": "0", "value": "-3/4", "method": "lu_series"} in rows


def test_eval_n_max_zero_all_ones():
    code, out, _ = run("eval", "--a", "0.5", "--b", "0.25", "--q", "0.5", "--n-max", "0", "--x-max", "4")
    assert code == 0
    doc = json.loads(out)
    assert doc["precision"] == "f64"
    assert [r["value"] for r in doc["rows"]] == [1.0] * 5


def test_eval_qhahn_top_column():
    code, out, _ = run("eval", "--family", "qhahn", "--a", "1/2", "--b", "1/4", "--q", "1/2", "--N", "3", "--n-max", "3", "--x-max", "3")
    doc = json.loads(out)
    assert code == 0
    assert all(r["value"] == "1" for r in doc["rows"] if r["x"] == 3)
    # rational mode emits numbers as strings
    assert all(isinstance(r["value"], str) for r in doc["rows"])


def test_fraction_forces_rational_and_conflict():
    code, out, _ = run("eval", "--a", "1/2", "--b", "0.25", "--q", "0.5")
    assert code == 0 and json.loads(out)["precision"] == "rational"
    code, _, err = run("eval", "--a", "1/2", "--q", "0.5", "--precision", "f64")
    assert code == 2 and json.loads(err)["error"] == "usage"


def test_parameter_error_exit_code():
    code, _, err = run("eval", "--a", "2", "--q", "0.5")
    assert code == 2
    rec = json.loads(err)
    assert rec["error"] == "parameter"
    code, _, _ = run("eval", "--a", "2", "--q", "0.5", "--relaxed", "--n-max", "1", "--x-max", "1")
    assert code == 0


def test_usage_errors():
    assert run("bogus")[0] == 2
    assert run("eval", "--q", "0.5")[0] == 2
    assert run("eval", "--a", "1/2", "--q", "1/2", "--method", "nope")[0] == 2
    assert run("eval", "--a", "x/2")[0] == 2


def test_factor_q_zero_reproduces_closed_factors():
    code, out, _ = run("factor", "--a", "1/2", "--b", "1/4", "--q", "0", "--cutoff", "3")
    doc = json.loads(out)
    assert code == 0
    assert doc["L"][1][:2] == ["-3/4", "7/4"]
    assert doc["L"][3] == ["0", "0", "-1", "2"]
    assert doc["U"][2] == ["0", "0", "1", "1"]
    assert doc["residual"] == "0"


def test_factor_size_one_and_qhahn():
    code, out, _ = run("factor", "--a", "1/2", "--b", "1/4", "--q", "1/2", "--cutoff", "0")
    doc = json.loads(out)
    assert (doc["B"], doc["D"], doc["C"]) == ([["1"]], ["1"], [["1"]])
    code, out, _ = run("factor", "--family", "qhahn", "--a", "0.5", "--b", "0.25", "--q", "0.5", "--N", "4")
    assert code == 0 and json.loads(out)["residual"] <= 1e-10
    code, out, _ = run("factor", "--family", "qhahn", "--a", "1/2", "--b", "1/4", "--q", "1/2", "--N", "4", "--format", "csv")
    assert out.splitlines()[0] == "matrix,row,col,value"
    assert out.splitlines()[-1] == "residual,,,0"


def test_verify_empty_grid():
    code, out, _ = run("verify", "all")
    doc = json.loads(out)
    assert code == 0 and doc["records"] == [] and doc["summary"]["total"] == 0
    jsonschema.validate(doc, report_schema())


def test_verify_product_passes():
    code, out, _ = run("verify", "product", "--a", "1/2", "--b", "1/4", "--cutoff", "12")
    doc = json.loads(out)
    jsonschema.validate(doc, report_schema())
    assert code == 0 and all(r["pass"] for r in doc["records"])
    assert all(isinstance(r["residual"], str) for r in doc["records"])
    nonneg = [r for r in doc["records"] if r["params"]["check"] == "nonneg_region"][0]
    assert nonneg["params"]["nonneg"] == "true"


def test_verify_product_witness_outside_region():
    code, out, _ = run("verify", "product", "--a", "3/4", "--b", "1/4", "--cutoff", "6", "--n-max", "6", "--x-max", "4")
    doc = json.loads(out)
    rec = [r for r in doc["records"] if r["params"]["check"] == "nonneg_region"][0]
    assert rec["pass"] and rec["params"]["nonneg"] == "false" and "witness" in rec["params"]


def test_verify_limits_small_q():
    code, out, _ = run("verify", "limits", "--a", "1/2", "--b", "1/4", "--q", "0.0001")
    doc = json.loads(out)
    jsonschema.validate(doc, report_schema())
    assert code == 0
    for r in doc["records"]:
        if r["params"]["check"] in ("q_to_0", "zero_hahn", "asymptotic"):
            assert float(r["residual"]) <= 10 * 1e-4


def test_verify_failure_exit_code():
    # an unattainable tolerance makes the float method spread fail
    code, out, _ = run("verify", "methods", "--a", "0.5", "--b", "0.25", "--q", "0.5", "--tol", "1e-30", "--n-max", "3", "--x-max", "3")
    assert code == 1
    assert json.loads(out)["summary"]["failed"] >= 1


def test_verify_seeded_reproducible_and_valid():
    args = ("verify", "all", "--seed", "5", "--draws", "2", "--precision", "f64", "--cutoff", "8", "--n-max", "6", "--x-max", "6")
    c1, o1, _ = run(*args)
    c2, o2, _ = run(*args)
    assert o1 == o2
    doc = json.loads(o1)
    assert doc["seed"] == 5
    jsonschema.validate(doc, report_schema())
    assert doc["summary"]["total"] > 0
    assert c1 == (1 if doc["summary"]["failed"] else 0)
    c3, o3, _ = run(*args[:3], "6", *args[4:])
    assert o3 != o1


def test_random_draws_have_small_denominators():
    code, out, _ = run("verify", "padic", "--seed", "9", "--draws", "6")
    doc = json.loads(out)
    assert code == 0 and len(doc["records"]) == 18
    code, out, _ = run("verify", "product", "--seed", "9", "--draws", "3", "--precision", "rational", "--cutoff", "4", "--n-max", "4", "--x-max", "3")
    for r in json.loads(out)["records"]:
        for k in ("a", "b"):
            assert int(r["params"][k].split("/")[-1]) <= 16


def test_verify_csv_has_seed_header():
    code, out, _ = run("verify", "padic", "--p", "3", "--r", "1", "--d", "3", "--m", "1", "--seed", "4", "--draws", "0", "--format", "csv")
    lines = out.splitlines()
    assert lines[0] == "# seed=4" and lines[1] == "suite,params,residual,bound,pass"
    assert len(lines) == 5 and code == 0


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "qortho", "eval", "--family", "little0jacobi", "--a", "1/2", "--b", "1/4", "--format", "csv"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0 and "1,0,-3/4,lu_series" in proc.stdout
