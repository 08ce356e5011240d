import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from helpers import make_context, random_poly

from jetvar.errors import JetOrderError, UndeclaredCoordinate
from jetvar.modelfile import parse_expr
from jetvar.symexpr import (Expr, FieldDecl, JetContext, eval_numeric, gauss_inverse, metric_symbols,
                            partial, random_metric, render_text, substitute)

seeds = st.integers(0, 10**6)


def _polys(seed, k=3):
    rng = random.Random(seed)
    ctx = make_context(rng.randint(1, 3), 2, rng.randint(1, 2))
    return ctx, [random_poly(rng, ctx, 2) for _ in range(k)]


@given(seeds)
def test_ring_axioms(seed):
    ctx, (a, b, c) = _polys(seed)
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert (a - a).is_zero()


@given(seeds)
def test_render_parse_round_trip(seed):
    ctx, (a, b, _) = _polys(seed)
    e = a * b - a
    assert parse_expr(render_text(e), ctx) == e


@given(seeds)
def test_partial_is_a_derivation(seed):
    ctx, (a, b, _) = _polys(seed)
    atoms = sorted((a * b).atoms())
    if not atoms:
        return
    c = random.Random(seed).choice(atoms)
    assert partial(a * b, c, ctx) == partial(a, c, ctx) * b + a * partial(b, c, ctx)


@given(seeds)
def test_evaluation_is_a_ring_homomorphism(seed):
    ctx, (a, b, _) = _polys(seed)
    rng = random.Random(seed + 1)
    point = {t: Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for t in (a * b).atoms()}
    va, vb = eval_numeric(a, point, ctx), eval_numeric(b, point, ctx)
    assert eval_numeric(a * b, point, ctx) == va * vb
    assert eval_numeric(a - b, point, ctx) == va - vb


def test_render_examples():
    ctx = make_context(2, 1)
    assert render_text(Expr()) == "0"
    assert render_text(ctx.y("y", (1,), (1,))) == "y[1; x1]"
    assert render_text(ctx.y("y").scale(Fraction(-1, 2))) == "-1/2*y[1]"


def test_substitute():
    ctx = make_context(1, 1)
    y = ctx.y("y")
    e = y * y + ctx.x(1)
    assert substitute(e, {y: ctx.x(1)}, ctx) == ctx.x(1) * ctx.x(1) + ctx.x(1)


def test_order_cap_enforced():
    ctx = JetContext(2, [FieldDecl.scalar("y")], max_order=1)
    with pytest.raises(JetOrderError):
        ctx.y("y", (1,), (1, 1))


def test_undeclared_component():
    ctx = make_context(2, 1)
    with pytest.raises(UndeclaredCoordinate):
        ctx.y("y", (3,))


def test_symmetric_components_are_canonical():
    ctx = JetContext(3, [FieldDecl.symmetric_tensor("g", 3)], 2)
    assert ctx.y("g", (3, 1)) == ctx.y("g", (1, 3))


@pytest.mark.parametrize("seed", range(5))
def test_metric_inverse_identity(seed):
    """g_{ma} g^{an} = delta at random invertible points near Minkowski."""
    n = 4
    ctx = JetContext(n, [FieldDecl.symmetric_tensor("g", n)], 2, metric_symbols("g", n), metric="g")
    gm = random_metric(n, random.Random(seed))
    point = {ctx.y("g", (a, b)): gm[a - 1][b - 1] for a in range(1, n + 1) for b in range(a, n + 1)}
    for m in range(1, n + 1):
        for v in range(1, n + 1):
            s = sum((ctx.derived_sym("glow", m, a) * ctx.y("g", (a, v)) for a in range(1, n + 1)), Expr())
            assert eval_numeric(s, point, ctx) == (1 if m == v else 0)
    inv, det = gauss_inverse(gm)
    sq = eval_numeric(ctx.derived_sym("sqrtg"), point, ctx)
    assert sq * sq * abs(det) == 1
