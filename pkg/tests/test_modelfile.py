from pathlib import Path

import pytest

from jetvar.errors import ModelError, ParseError
from jetvar.modelfile import parse_expr, parse_model, render_model
from jetvar.models import build_model
from jetvar.symexpr import render_text

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

SCALAR = """\
# free scalar in two dimensions
[space]
n = 2

[fields]
y = field scalar

[lagrangian]
  1/2*y[1; x1]^2
  - 1/2*y[1; x2]^2
"""


def test_minimal_scalar_file():
    m = parse_model(SCALAR)
    assert m.n == 2
    assert [f.name for f in m.ctx.fields.values()] == ["y"]
    assert m.lagrangian == build_model("scalar").lagrangian


@pytest.mark.parametrize("fname, mid, params", [
    ("scalar2.model", "scalar", {"n": 2}),
    ("maxwell4.model", "maxwell", {"n": 4}),
    ("yang_mills_su2_4.model", "yang_mills", {"n": 4}),
    ("einstein_hilbert4.model", "einstein_hilbert", {"n": 4}),
])
def test_fixtures_match_builders(fname, mid, params):
    parsed = parse_model(FIXTURES / fname)
    built = build_model(mid, **params)
    assert parsed.lagrangian == built.lagrangian
    assert set(parsed.generators) == set(built.generators)
    for name, g in built.generators.items():
        assert parsed.generators[name].fiber == g.fiber
        assert parsed.generators[name].base == g.base


@pytest.mark.parametrize("path", sorted(FIXTURES.glob("*.model")), ids=lambda p: p.name)
def test_render_parse_round_trip(path):
    text = path.read_text(encoding="utf-8")
    assert render_model(parse_model(text)) == text


def test_order_above_cap_is_a_semantic_error():
    bad = SCALAR.replace("n = 2", "n = 2\nmax_order = 1").replace("y[1; x2]^2", "y[1; x2^2]^2")
    with pytest.raises(ModelError):
        parse_model(bad)


@pytest.mark.parametrize("text, line", [
    (SCALAR.replace("- 1/2*y[1; x2]^2", "- 1/2*y[1; x2]^^2"), 10),
    (SCALAR.replace("[space]", "[spaces]"), 2),
    (SCALAR.replace("y = field scalar", "y = thing"), 6),
])
def test_syntax_errors_carry_positions(text, line):
    with pytest.raises(ParseError) as info:
        parse_model(text)
    assert info.value.line == line


def test_undeclared_field_is_rejected():
    with pytest.raises((ModelError, ParseError)):
        parse_model(SCALAR.replace("- 1/2*y[1; x2]^2", "- z[1]"))


def test_invalid_structure_constants_rejected():
    text = (FIXTURES / "yang_mills_su2_4.model").read_text(encoding="utf-8")
    text = text.replace("structure[1,2,3] = 1", "structure[1,2,3] = 2", 1)
    assert "structure[1,2,3] = 2" in text
    with pytest.raises(ModelError):
        parse_model(text)


def test_expression_grammar():
    ctx = build_model("scalar").ctx
    e = parse_expr("+2*x[1]*y[1; x1 x2] - (y[1] - 1)^2", ctx)
    assert render_text(parse_expr(render_text(e), ctx)) == render_text(e)
    with pytest.raises(ParseError) as info:
        parse_expr("y[1] +", ctx)
    assert info.value.column is not None
