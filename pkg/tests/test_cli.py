import contextlib
import io
import json
from fractions import Fraction
from pathlib import Path

import pytest

from jetvar.cli import main
from jetvar.report import render_latex
from jetvar.symexpr import Expr
from jetvar.models import build_model

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
MAXWELL = str(FIXTURES / "maxwell4.model")
SCALAR = str(FIXTURES / "scalar2.model")


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = main(list(argv))
    return code, out.getvalue(), err.getvalue()


def test_el_scalar_is_wave_operator():
    code, out, _ = run("el", SCALAR)
    assert code == 0
    assert "y[1] = -y[1; x1^2] + y[1; x2^2]" in out
    assert out.rstrip().endswith("status: pass")


def test_superpotential_maxwell_json():
    code, out, _ = run("superpotential", MAXWELL, "--gen", "gauge", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert list(doc) == ["schema", "command", "model", "input_digest", "generator", "seed",
                         "results", "info", "verification", "status"]
    assert doc["schema"] == "jetvar-report/1"
    assert doc["results"]["superpotential"]["nu^12"] == "-1/2*A[1; x2]*chi[1] + 1/2*A[2; x1]*chi[1]"
    assert {v["check"] for v in doc["verification"]} >= {"2 D_m nu^{s m} = eps^s - eps~^s"}
    assert doc["status"] == "pass"


def test_el_maxwell_json_keys_by_field_and_index():
    code, out, _ = run("el", MAXWELL, "--format", "json")
    doc = json.loads(out)
    assert sorted(doc["results"]["euler_lagrange"]) == ["A[1]", "A[2]", "A[3]", "A[4]"]


def test_bianchi_maxwell_gauge_passes():
    code, out, _ = run("bianchi", MAXWELL, "--gen", "gauge")
    assert code == 0
    assert "[pass] beta vanishes for a symmetry" in out


@pytest.mark.parametrize("argv", [
    ("noether", MAXWELL, "--gen", "translation_3"),
    ("jacobi", MAXWELL),
    ("helmholtz", SCALAR),
    ("kernel", MAXWELL, "--gen", "gauge"),
    ("secondvar", SCALAR, "--gen", "vertical_split"),
    ("momenta", SCALAR),
])
def test_commands_pass(argv):
    code, out, err = run(*argv)
    assert code == 0, out + err


def test_verification_failure_exit_code():
    code, out, _ = run("superpotential", MAXWELL, "--gen", "horizontal_split")
    assert code == 2
    assert "[FAIL]" in out


@pytest.mark.parametrize("argv", [
    ("frobnicate", MAXWELL),
    ("el",),
    ("el", "does/not/exist.model"),
    ("noether", MAXWELL),
    ("noether", MAXWELL, "--gen", "nope"),
    ("el", str(FIXTURES / "einstein_hilbert4.model")),
])
def test_usage_errors_exit_1(argv):
    code, out, err = run(*argv)
    assert code == 1
    assert out == ""
    assert err.startswith("jetvar:")


def test_parse_error_exit_1(tmp_path):
    bad = tmp_path / "bad.model"
    bad.write_text("[space]\nn = 2\n[fields]\ny = field\n[lagrangian]\n  y[1] +\n", encoding="utf-8")
    code, _, err = run("el", str(bad))
    assert code == 1
    assert "line 6" in err


def test_reports_are_deterministic():
    a = run("noether", MAXWELL, "--gen", "gauge", "--format", "json")
    b = run("noether", MAXWELL, "--gen", "gauge", "--format", "json")
    assert a == b
    assert "seconds" not in a[1]
    timed = run("el", SCALAR, "--timing")[1]
    assert "seconds:" in timed


def test_latex_document_is_standalone():
    code, out, _ = run("el", MAXWELL, "--format", "latex")
    assert out.startswith("\\documentclass{article}")
    assert out.rstrip().endswith("\\end{document}")
    assert out.count("\\begin{align*}") == out.count("\\end{align*}")


def test_latex_expression_rendering():
    ctx = build_model("einstein_hilbert").ctx
    e = (ctx.derived_sym("sqrtg") * ctx.const("kappa") ** -1).scale(Fraction(1, 2))
    s = render_latex(e)
    assert "\\sqrt{|g|}" in s and "\\kappa" in s and "\\frac{1}{2}" in s
    assert render_latex(Expr()) == "0"


def test_builtin_model_ids_are_accepted():
    code, out, _ = run("el", "scalar")
    assert code == 0
