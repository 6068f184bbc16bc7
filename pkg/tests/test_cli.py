from __future__ import annotations

import csv
import io
import json

from fractions import Fraction

import jsonschema
import pytest

from urnlab.cli import main
from urnlab.model import load_spec
from urnlab.moments import mean_white
from urnlab.serialize import load_schema

SPECS = {
    "large": {"m": 2, "sigma": 7, "a_m_minus_1": 3, "a_m": 1, "w0": 4, "b0": 3, "model": "R"},
    "polya": {"m": 1, "sigma": 1, "a_m_minus_1": 1, "a_m": 0, "w0": 1, "b0": 1, "model": "M"},
    "triangular": {"m": 2, "sigma": 4, "a_m_minus_1": 1, "a_m": 0, "w0": 1, "b0": 3, "model": "M"},
    "critical": {"m": 2, "sigma": 4, "a_m_minus_1": 2, "a_m": 1, "w0": 2, "b0": 2, "model": "M"},
    "black": {"m": 2, "sigma": 4, "a_m_minus_1": 3, "a_m": 2, "w0": 2, "b0": 3, "model": "M"},
}


@pytest.fixture
def spec_file(tmp_path):
    def make(name):
        path = tmp_path / f"{name}.json"
        path.write_text(json.dumps(SPECS[name]))
        jsonschema.validate(SPECS[name], load_schema("spec"))
        return str(path)

    return make


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_classify(capsys, spec_file):
    code, out, _ = run(capsys, "classify", "--spec", spec_file("large"))
    data = json.loads(out)
    jsonschema.validate(data, load_schema("classify"))
    assert code == 0 and data["class"] == "Large" and data["lambda"] == "4/7"
    code, out, _ = run(capsys, "classify", "--spec", spec_file("polya"))
    assert json.loads(out)["class"] == "Polya" and json.loads(out)["lambda"] == "1"


def test_malformed_spec_exit_2(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{oops")
    code, out, err = run(capsys, "classify", "--spec", str(bad))
    assert code == 2 and out == "" and "malformed" in err


def test_unknown_key_exit_2(capsys, tmp_path):
    path = tmp_path / "x.json"
    path.write_text(json.dumps({**SPECS["large"], "colour": "red"}))
    assert run(capsys, "classify", "--spec", str(path))[0] == 2


def test_moments_csv(capsys, spec_file):
    code, out, _ = run(capsys, "moments", "--spec", spec_file("large"), "--n", "3", "--smax", "2", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0
    assert rows[0] == ["n", "s", "shifted", "numerator", "denominator", "decimal", "raw", "raw_decimal"]
    assert ",".join(next(r for r in rows if r[:2] == ["1", "1"])).startswith("1,1,104/21,")
    assert [r[2] for r in rows[1:4]] == ["1", "4", "16"]


def test_moments_json_schema(capsys, spec_file):
    code, out, _ = run(capsys, "moments", "--spec", spec_file("triangular"), "--n", "4")
    data = json.loads(out)
    jsonschema.validate(data, load_schema("moments"))
    mean = {e["n"]: e["raw"]["value"] for e in data["entries"] if e["s"] == 1}
    assert mean[1] == "3/2"


def test_triangular_mean_column(capsys, spec_file):
    code, out, _ = run(capsys, "moments", "--spec", spec_file("triangular"), "--n", "4", "--format", "csv")
    rows = [r for r in csv.DictReader(io.StringIO(out)) if r["s"] == "1"]
    spec = load_spec(spec_file("triangular"))
    assert [Fraction(r["raw"]) for r in rows] == [mean_white(int(r["n"]), spec) for r in rows]


def test_limits_polya(capsys, spec_file):
    code, out, _ = run(capsys, "limits", "--spec", spec_file("polya"), "--smax", "2")
    data = json.loads(out)
    jsonschema.validate(data, load_schema("limits"))
    assert code == 0
    rec = {r["s"]: r for r in data["records"]}
    assert rec[0]["E_s"] == 1.0
    assert rec[2]["E_s"] == pytest.approx(1 / 3, abs=1e-7)
    assert rec[1]["E_s"] == pytest.approx(0.5, abs=1e-12)


def test_limits_unsupported_exit_3(capsys, spec_file):
    assert run(capsys, "limits", "--spec", spec_file("critical"))[0] == 3


def test_limits_slow_exit_4_still_writes(capsys, spec_file):
    code, out, err = run(capsys, "limits", "--spec", spec_file("large"), "--smax", "3", "--nmax", "512", "--tol", "1e-12")
    assert code == 4
    data = json.loads(out)
    assert data["converged"] is False
    assert "tolerance" in err


def test_swap_colors(capsys, spec_file):
    _, out, _ = run(capsys, "classify", "--spec", spec_file("black"))
    assert json.loads(out)["class"] == "TriangularBlack"
    _, out, _ = run(capsys, "classify", "--spec", spec_file("black"), "--swap-colors")
    assert json.loads(out)["class"] == "Triangular"


def test_simulate_reproducible(capsys, spec_file, tmp_path):
    args = ("simulate", "--spec", spec_file("large"), "--n", "200", "--reps", "500", "--seed", "9")
    code, first, _ = run(capsys, *args)
    _, second, _ = run(capsys, *args, "--workers", "2")
    assert code == 0 and first == second
    jsonschema.validate(json.loads(first), load_schema("simulate"))


def test_verify_default_grid(capsys):
    code, out, _ = run(capsys, "verify")
    data = json.loads(out)
    jsonschema.validate(data, load_schema("verify"))
    assert code == 0 and data["passed"]


def test_verify_fault_injection(capsys):
    code, out, err = run(capsys, "verify", "--inject-fault", "2,2,1")
    assert code == 5
    assert "FAIL oracle" in err


def test_verify_size_limit(capsys, spec_file):
    code, out, err = run(capsys, "verify", "--spec", spec_file("polya"), "--n", "60")
    assert code == 5 and "SizeLimit" in err


def test_report(capsys, spec_file, tmp_path):
    target = tmp_path / "report.json"
    code, out, _ = run(capsys, "report", "--spec", spec_file("triangular"), "--n", "50", "--reps", "200",
                       "--smax", "2", "--out", str(target))
    assert code == 0 and out == ""
    data = json.loads(target.read_text())
    jsonschema.validate(data, load_schema("report"))
    assert data["classification"]["class"] == "Triangular"


def test_bad_arguments_exit_2(capsys, spec_file):
    assert run(capsys, "limits", "--spec", spec_file("polya"), "--tol", "0")[0] == 2
    assert run(capsys, "moments", "--spec", spec_file("polya"), "--format", "xml")[0] == 2
    assert run(capsys, "moments")[0] == 2


def test_triangular_mean_column_closed_form(capsys, spec_file):
    """Documented example: mean column equals (n sigma + T0) w0 / T0 (exact only at lam = 1)."""
    code, out, _ = run(capsys, "moments", "--spec", spec_file("triangular"), "--n", "4", "--format", "csv")
    rows = [r for r in csv.DictReader(io.StringIO(out)) if r["s"] == "1"]
    spec = load_spec(spec_file("triangular"))
    assert [Fraction(r["raw"]) for r in rows] == [
        Fraction((int(r["n"]) * spec.sigma + spec.t0) * spec.w0, spec.t0) for r in rows
    ]
