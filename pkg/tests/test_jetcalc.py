import random

import mpmath
import pytest
from hypothesis import given, strategies as st

from helpers import make_context, random_generator, random_poly
from oracles import compose, random_section

from jetvar.errors import JetOrderError, JetvarError
from jetvar.jetcalc import (GeneratorSpec, divergence, lie_derivative_density, total_derivative,
                            total_derivative_multi, vertical_part)
from jetvar.multiindex import MultiIndex
from jetvar.symexpr import Expr, evaluate

seeds = st.integers(0, 10**6)


@given(seeds)
def test_total_derivatives_commute(seed):
    rng = random.Random(seed)
    ctx = make_context(rng.randint(2, 3), 2)
    f = random_poly(rng, ctx, 2)
    a, b = rng.sample(range(1, ctx.n + 1), 2)
    assert total_derivative(total_derivative(f, a, ctx), b, ctx) == \
        total_derivative(total_derivative(f, b, ctx), a, ctx)


@given(seeds)
def test_leibniz_rule(seed):
    rng = random.Random(seed)
    ctx = make_context(rng.randint(1, 3), 2)
    f, g = random_poly(rng, ctx, 2), random_poly(rng, ctx, 2)
    s = rng.randint(1, ctx.n)
    D = lambda e: total_derivative(e, s, ctx)
    assert D(f * g) == D(f) * g + f * D(g)


@given(seeds)
def test_total_derivative_is_chain_rule_along_sections(seed):
    """(D_s f) o j gamma = d/dx_s (f o j gamma) exactly."""
    rng = random.Random(seed)
    ctx = make_context(rng.randint(1, 3), 2, rng.randint(1, 2))
    f = random_poly(rng, ctx, 2)
    gamma = random_section(rng, ctx)
    s = rng.randint(1, ctx.n)
    lhs = compose(total_derivative(f, s, ctx), gamma, ctx)
    rhs = total_derivative(compose(f, gamma, ctx), s, ctx)
    assert lhs == rhs


@pytest.mark.parametrize("seed", range(8))
def test_total_derivative_matches_finite_differences(seed):
    """Numerical oracle: mpmath finite differences of the composed function."""
    rng = random.Random(seed)
    ctx = make_context(1, 2)
    f = random_poly(rng, ctx, 2)
    gamma = random_section(rng, ctx)
    composed = compose(f, gamma, ctx)
    dcomp = compose(total_derivative(f, 1, ctx), gamma, ctx)
    x0 = mpmath.mpf(rng.randint(-5, 5)) / 7
    at = lambda e, x: evaluate(e, lambda a: x, ctx)
    with mpmath.workdps(40):
        fd = mpmath.diff(lambda x: at(composed, x), x0)
        exact = at(dcomp, x0)
        assert abs(fd - exact) <= mpmath.mpf(10) ** -25 * (1 + abs(exact))


def test_multi_derivative_and_divergence():
    ctx = make_context(2, 2)
    y = ctx.y("y")
    assert total_derivative_multi(y, MultiIndex((1, 1)), ctx) == ctx.y("y", (1,), (1, 2))
    assert divergence([ctx.x(1), ctx.x(2) * y], ctx) == Expr.const(1) + y + ctx.x(2) * ctx.y("y", (1,), (2,))


def test_order_cap():
    ctx = make_context(1, 0)
    top = ctx.y("y", (1,), (1,) * ctx.max_order)
    with pytest.raises(JetOrderError):
        total_derivative(top, 1, ctx)


def test_vertical_part_subtracts_horizontal_transport():
    ctx = make_context(2, 1)
    g = GeneratorSpec((Expr.const(1), Expr()), {}, ())
    assert vertical_part(g, ctx)[("y", (1,))] == -ctx.y("y", (1,), (1,))


def test_translation_invariant_density_is_symmetric():
    ctx = make_context(2, 1)
    L = ctx.y("y", (1,), (1,)) ** 2 - ctx.y("y") ** 4
    for k in (1, 2):
        base = tuple(Expr.const(1 if s == k else 0) for s in (1, 2))
        assert lie_derivative_density(L, GeneratorSpec(base), ctx).is_zero()


@given(seeds)
def test_lie_derivative_of_a_divergence_is_a_divergence(seed):
    """Lie derivatives along projectable generators preserve total divergences."""
    from jetvar.variational import is_divergence
    rng = random.Random(seed)
    ctx = make_context(rng.randint(1, 2), 1)
    f = [random_poly(rng, ctx, 1, terms=3) for _ in range(ctx.n)]
    g = random_generator(rng, ctx)
    assert is_divergence(lie_derivative_density(divergence(f, ctx), g, ctx), ctx)


def test_vertical_generator_rejects_base_part():
    with pytest.raises(JetvarError):
        GeneratorSpec((Expr.const(1),), {}, (), "vertical")
    with pytest.raises(JetvarError):
        GeneratorSpec((Expr(),), {}, (), "bogus")
