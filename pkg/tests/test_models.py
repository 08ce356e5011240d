import random
from fractions import Fraction

import pytest

from jetvar.errors import ModelError
from jetvar.jetcalc import lie_derivative_density
from jetvar.models import (MODEL_IDS, build_model, catalog_generator, identity_form,
                           su2_structure_constants, validate_lie_algebra)
from jetvar.sectionprobe import ProbeConfig, Section
from jetvar.symexpr import gauss_inverse
from jetvar.taylor import TaylorSpace


def test_su2_data_is_valid():
    validate_lie_algebra(3, su2_structure_constants(), identity_form(3))


@pytest.mark.parametrize("c, k", [
    ({(1, 1, 2): 1, (1, 2, 1): 1}, identity_form(2)),          # not antisymmetric
    (su2_structure_constants(), {(1, 1): 1, (2, 2): 2, (3, 3): 1}),  # not ad-invariant
    ({(1, 2, 3): 1, (1, 3, 2): -1}, identity_form(3)),           # Jacobi fails
])
def test_invalid_lie_data_rejected(c, k):
    with pytest.raises(ModelError):
        validate_lie_algebra(max(max(key) for key in c), c, k)


def test_invalid_structure_constants_in_builder():
    with pytest.raises(ModelError):
        build_model("yang_mills", structure_constants={(1, 2, 3): 1, (1, 3, 2): -1})


@pytest.mark.parametrize("mid, n", [("maxwell", 1), ("maxwell", 9), ("einstein_hilbert", 12)])
def test_dimension_range(mid, n):
    with pytest.raises(ModelError):
        build_model(mid, n=n)


def test_unknown_ids():
    with pytest.raises(ModelError):
        build_model("gravity")
    with pytest.raises(ModelError):
        catalog_generator(build_model("scalar"), "gauge")


def test_scalar_density():
    m = build_model("scalar", n=2)
    c = m.ctx
    want = (c.y("y", (1,), (1,)) ** 2 - c.y("y", (1,), (2,)) ** 2).scale(Fraction(1, 2))
    assert m.lagrangian == want


def test_maxwell_is_first_order():
    m = build_model("maxwell", n=4)
    assert m.lagrangian.max_jet_order() == 1


def test_einstein_yang_mills_order_profile():
    m = build_model("einstein_yang_mills", n=4)
    assert m.order_profile == (3, 2)
    assert {"g", "w", "xi", "chi"} <= set(m.ctx.fields)


@pytest.mark.parametrize("mid", ["scalar", "maxwell", "yang_mills"])
def test_flat_catalog_generators_are_symmetries_where_expected(mid):
    m = build_model(mid)
    for name, g in m.generators.items():
        lie = lie_derivative_density(m.lagrangian, g, m.ctx)
        if name.startswith("translation") or name == "gauge":
            assert lie.is_zero(), name


def test_yang_mills_gauge_action_is_covariant_derivative():
    m = build_model("yang_mills")
    c = m.ctx
    g = catalog_generator(m, "gauge")
    # Xi on w^1_2 = D_2 chi^1 + c^1_{23} w^2_2 chi^3 + c^1_{32} w^3_2 chi^2
    want = c.y("chi", (1,), (2,)) + c.y("w", (2, 2)) * c.y("chi", (3,)) - c.y("w", (3, 2)) * c.y("chi", (2,))
    assert g.fiber[("w", (1, 2))] == want


def test_catalog_names():
    assert set(MODEL_IDS) == {"scalar", "maxwell", "yang_mills", "einstein_hilbert", "einstein_yang_mills"}
    m = build_model("maxwell")
    assert catalog_generator(m, "translation") == catalog_generator(m, "translation_1")
    assert catalog_generator(m, "vertical_split") == catalog_generator(m, "gauge")


# curvature, against a direct computation on Taylor series ------------------

def _section(n, seed):
    m = build_model("einstein_hilbert", n=n)
    space = TaylorSpace(n, 4)
    sec = Section(m.ctx, space, random.Random(seed), ProbeConfig())
    return m, sec


def _textbook_geometry(sec, n):
    """Christoffels and Ricci from the metric series with plain derivatives."""
    ctx = sec.ctx
    up = [[sec.evaluate(ctx.y("g", (a, b))) for b in range(1, n + 1)] for a in range(1, n + 1)]
    low, _ = gauss_inverse(up)
    r = range(n)
    d = lambda t, s: t.derivative(s + 1)
    Gam = [[[None] * n for _ in r] for _ in r]
    for m in r:
        for a in r:
            for b in r:
                acc = sec.space.const(0)
                for v in r:
                    acc = acc + up[m][v] * (d(low[v][b], a) + d(low[v][a], b) - d(low[a][b], v))
                Gam[m][a][b] = acc * Fraction(1, 2)
    Ric = [[None] * n for _ in r]
    for a in r:
        for b in r:
            acc = sec.space.const(0)
            for m in r:
                acc = acc + d(Gam[m][a][b], m) - d(Gam[m][a][m], b)
                for v in r:
                    acc = acc + Gam[m][m][v] * Gam[v][a][b] - Gam[m][b][v] * Gam[v][a][m]
            Ric[a][b] = acc
    return Gam, Ric, low, up


@pytest.mark.parametrize("seed", range(3))
def test_christoffel_and_ricci_match_direct_computation(seed):
    n = 3
    m, sec = _section(n, seed)
    Gam, Ric, _, _ = _textbook_geometry(sec, n)
    ctx = m.ctx
    for a in range(1, n + 1):
        for b in range(1, n + 1):
            assert (sec.evaluate(ctx.derived_sym("Ric", a, b)) - Ric[a - 1][b - 1]).is_zero()
            for mu in range(1, n + 1):
                got = sec.evaluate(ctx.derived_sym("Gamma", mu, a, b))
                assert (got - Gam[mu - 1][a - 1][b - 1]).is_zero()
                assert (got - sec.evaluate(ctx.derived_sym("Gamma", mu, b, a))).is_zero()


@pytest.mark.parametrize("seed", range(3))
def test_two_dimensional_ricci_is_pure_trace(seed):
    """In two dimensions Ric_ab = (R/2) g_ab."""
    m, sec = _section(2, seed)
    ctx = m.ctx
    ric = [[sec.evaluate(ctx.derived_sym("Ric", a, b)) for b in (1, 2)] for a in (1, 2)]
    up = [[sec.evaluate(ctx.y("g", (a, b))) for b in (1, 2)] for a in (1, 2)]
    low, _ = gauss_inverse(up)
    R = sum((up[a][b] * ric[a][b] for a in range(2) for b in range(2)), sec.space.const(0))
    for a in range(2):
        for b in range(2):
            assert (ric[a][b] * 2 - R * low[a][b]).is_zero()
