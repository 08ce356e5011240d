from fractions import Fraction

import pytest

from jetvar.models import build_model, catalog_generator
from jetvar.sectionprobe import ProbeConfig, probe_superpotential


@pytest.fixture(scope="module")
def eh():
    return build_model("einstein_hilbert", n=4)


def test_einstein_hilbert_komar(eh):
    s = probe_superpotential(eh.lagrangian, catalog_generator(eh, "horizontal_split"), eh.ctx,
                             ProbeConfig(points=4, seed=3), komar=True)
    assert s.bianchi_zero and s.strong_conservation and s.cascade_exact and s.residual_zero
    assert s.komar_consistent and s.komar_constant == -1


def test_cosmological_term_is_invariant(eh):
    L = eh.lagrangian + eh.ctx.derived_sym("sqrtg").scale(Fraction(3, 7))
    s = probe_superpotential(L, catalog_generator(eh, "horizontal_split"), eh.ctx, ProbeConfig(points=2))
    assert s.bianchi_zero and s.residual_zero


def test_broken_density_is_caught(eh):
    """A non-covariant term must make the Bianchi check fail."""
    ctx = eh.ctx
    L = eh.lagrangian + ctx.derived_sym("sqrtg") * ctx.y("g", (1, 1))
    s = probe_superpotential(L, catalog_generator(eh, "horizontal_split"), ctx, ProbeConfig(points=2))
    assert not s.bianchi_zero
    assert s.failures


def test_probe_agrees_with_symbolic_result_on_maxwell():
    m = build_model("maxwell", n=4)
    s = probe_superpotential(m.lagrangian, catalog_generator(m, "gauge"), m.ctx, ProbeConfig(points=3))
    assert s.bianchi_zero and s.strong_conservation and s.cascade_exact and s.residual_zero


def test_probe_rejects_non_symmetry_on_maxwell():
    m = build_model("maxwell", n=4)
    s = probe_superpotential(m.lagrangian, catalog_generator(m, "horizontal_split"), m.ctx,
                             ProbeConfig(points=2))
    assert not s.bianchi_zero
