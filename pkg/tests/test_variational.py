import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from helpers import make_context, random_density, random_generator, random_poly
from oracles import compose, integrate_unit_box, random_section

from jetvar.jetcalc import GeneratorSpec, divergence, total_derivative, total_derivative_multi
from jetvar.models import build_model
from jetvar.multiindex import MultiIndex
from jetvar.symexpr import Expr, FieldDecl, partial
from jetvar.variational import (euler_lagrange, euler_lagrange_from_momenta, first_variation_residual,
                                formal_adjoint, helmholtz, is_divergence, jacobi, linearize, momenta,
                                pair, second_variation_pair, variation_context)

seeds = st.integers(0, 10**6)


def test_scalar_wave_equation():
    m = build_model("scalar", n=2)
    E = euler_lagrange(m.lagrangian, m.ctx)
    c = m.ctx
    assert E[("y", (1,))] == -c.y("y", (1,), (1, 1)) + c.y("y", (1,), (2, 2))


def test_massive_scalar():
    m = build_model("scalar", n=2, mass=3)
    E = euler_lagrange(m.lagrangian, m.ctx)
    c = m.ctx
    assert E[("y", (1,))] == -c.y("y", (1,), (1, 1)) + c.y("y", (1,), (2, 2)) - c.y("y").scale(9)


def test_hand_computed_nonlinear_example():
    ctx = make_context(1, 1)
    y, y1, y11 = ctx.y("y"), ctx.y("y", (1,), (1,)), ctx.y("y", (1,), (1, 1))
    assert euler_lagrange(y1 * y1 * y, ctx)[("y", (1,))] == -(y1 * y1) - (y * y11).scale(2)


def test_maxwell_field_equations_and_noether_identity():
    m = build_model("maxwell", n=4)
    ctx = m.ctx
    E = euler_lagrange(m.lagrangian, ctx)
    eta = [1, -1, -1, -1]

    def F(a, b):
        return ctx.y("A", (b,), (a,)) - ctx.y("A", (a,), (b,))

    for mu in range(1, 5):
        want = sum((total_derivative(F(v, mu), v, ctx).scale(eta[v - 1] * eta[mu - 1])
                    for v in range(1, 5)), Expr())
        assert E[("A", (mu,))] in (want, -want)
    assert divergence([E[("A", (mu,))] for mu in range(1, 5)], ctx).is_zero()


@pytest.mark.parametrize("seed", range(10))
def test_euler_lagrange_against_integration_oracle(seed):
    """int (d/dt L(gamma + t eta)) = int E(gamma) eta for eta vanishing to high order on the box."""
    rng = random.Random(seed)
    n = rng.randint(1, 2)
    s = rng.randint(1, 2)
    ctx = make_context(n, s)
    L = random_poly(rng, ctx, s, terms=4, degree=3, with_x=False)
    gamma = random_section(rng, ctx, degree=2)
    bump = Expr.const(1)
    for k in range(1, n + 1):
        xk = ctx.x(k)
        bump = bump * (xk * (Expr.const(1) - xk)) ** (s + 1)
    eta = bump * Expr.const(Fraction(rng.randint(1, 5), 3))
    lhs = Expr()
    for a in L.atoms():
        if a[0] == "y":
            lhs = lhs + compose(partial(L, a, ctx), gamma, ctx) * total_derivative_multi(eta, a[3], ctx)
    rhs = compose(euler_lagrange(L, ctx)[("y", (1,))], gamma, ctx) * eta
    assert integrate_unit_box(lhs) == integrate_unit_box(rhs)


@given(seeds)
def test_divergences_have_no_euler_lagrange(seed):
    rng = random.Random(seed)
    ctx = make_context(rng.randint(1, 3), 2)
    f = [random_poly(rng, ctx, 1) for _ in range(ctx.n)]
    assert not any(v.terms for v in euler_lagrange(divergence(f, ctx), ctx).values())


@given(seeds)
def test_momenta_close_on_euler_lagrange(seed):
    ctx, L, _ = random_density(random.Random(seed))
    assert euler_lagrange_from_momenta(L, ctx) == euler_lagrange(L, ctx)


@given(seeds)
def test_top_momenta_are_plain_derivatives(seed):
    """For |beta| + 1 = s the momentum is the weighted top-order partial."""
    rng = random.Random(seed)
    ctx = make_context(rng.randint(1, 2), 1)
    L = random_poly(rng, ctx, 1)
    p = momenta(L, ctx)
    zero = MultiIndex.zero(ctx.n)
    for s in range(1, ctx.n + 1):
        a = ctx.y("y", (1,), (s,))
        assert p.get((("y", (1,)), zero, s), Expr()) == partial(L, a, ctx)


@given(seeds)
def test_helmholtz_and_self_adjointness(seed):
    ctx, L, _ = random_density(random.Random(seed))
    E = euler_lagrange(L, ctx)
    assert helmholtz(E, ctx).is_zero()
    K = linearize(E, ctx)
    assert formal_adjoint(K, ctx) == K


@given(seeds)
def test_formal_adjoint_is_an_involution(seed):
    rng = random.Random(seed)
    ctx = make_context(rng.randint(1, 2), 2, 2)
    delta = {("y", c): random_poly(rng, ctx, 2, terms=3) for c in ctx.fields["y"].components}
    K = linearize(delta, ctx)
    assert formal_adjoint(formal_adjoint(K, ctx), ctx) == K


@given(seeds)
def test_adjoint_pairing_differs_by_divergence(seed):
    """<zeta, K eta> - <K* zeta, eta> is a total divergence."""
    rng = random.Random(seed)
    ctx = make_context(rng.randint(1, 2), 1)
    delta = {("y", (1,)): random_poly(rng, ctx, 1, terms=3)}
    ext, eta = variation_context(ctx)
    ext = ext.with_fields([FieldDecl.scalar("zeta", kind="parameter")])
    zeta = {("y", (1,)): ext.y("zeta")}
    K = linearize(delta, ext, fields=["y"])
    lhs = pair(zeta, K.apply(eta, ext)) - pair(formal_adjoint(K, ext).apply(zeta, ext), eta)
    assert is_divergence(lhs, ext)


def test_non_variational_source_detected():
    ctx = make_context(1, 1, 2)
    delta = {("y", (1,)): ctx.y("y", (2,)), ("y", (2,)): -ctx.y("y", (1,))}
    assert not helmholtz(delta, ctx).is_zero()


@given(seeds)
def test_first_variation_identity(seed):
    rng = random.Random(seed)
    ctx, L, _ = random_density(rng)
    g = random_generator(rng, ctx, with_base=rng.random() < 0.6)
    assert first_variation_residual(L, g, ctx).is_zero()


@given(seeds)
def test_second_variation_routes_agree_mod_divergence(seed):
    rng = random.Random(seed)
    ctx = make_context(rng.randint(1, 2), 1, rng.randint(1, 2))
    L = random_poly(rng, ctx, 1, terms=4)
    g = random_generator(rng, ctx, with_base=False)
    a, b = second_variation_pair(L, g, ctx)
    assert is_divergence(a - b, ctx)


def test_jacobi_of_free_scalar_is_the_wave_operator():
    m = build_model("scalar", n=2)
    ext, eta = variation_context(m.ctx)
    J = jacobi(m.lagrangian, eta, ext)
    assert J[("y", (1,))] == -ext.y("eta_y", (1,), (1, 1)) + ext.y("eta_y", (1,), (2, 2))
