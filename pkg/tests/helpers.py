"""Random polynomial densities and generators for the property suites."""

import random
from fractions import Fraction

from jetvar.jetcalc import GeneratorSpec
from jetvar.multiindex import enumerate_indices
from jetvar.symexpr import Expr, FieldDecl, JetContext


def rational(rng: random.Random) -> Fraction:
    q = Fraction(rng.randint(-4, 4), rng.randint(1, 3))
    return q or Fraction(1)


def make_context(n: int, s: int, m: int = 1, params: int = 0) -> JetContext:
    fields = [FieldDecl.scalar("y", m)]
    if params:
        fields.append(FieldDecl.scalar("xi", params, kind="parameter"))
    return JetContext(n, fields, max_order=4 * s + 4)


def jet_atoms(ctx: JetContext, s: int, names=("y",)):
    out = []
    for name in names:
        for comp in ctx.fields[name].components:
            for alpha in enumerate_indices(ctx.n, s):
                out.append(ctx.y(name, comp, alpha))
    return out


def random_poly(rng: random.Random, ctx: JetContext, s: int, terms: int = 6, degree: int = 3,
                names=("y",), with_x: bool = True) -> Expr:
    atoms = jet_atoms(ctx, s, names)
    if with_x:
        atoms = atoms + [ctx.x(k) for k in range(1, ctx.n + 1)]
    out = Expr()
    for _ in range(rng.randint(1, terms)):
        t = Expr.const(rational(rng))
        for _ in range(rng.randint(1, degree)):
            t = t * rng.choice(atoms)
        out = out + t
    return out


def random_density(rng: random.Random, n_max: int = 3, s_max: int = 2, terms: int = 6, m_max: int = 2):
    n = rng.randint(1, n_max)
    s = rng.randint(1, s_max)
    m = rng.randint(1, m_max)
    ctx = make_context(n, s, m)
    return ctx, random_poly(rng, ctx, s, terms), s


def random_generator(rng: random.Random, ctx: JetContext, with_base: bool = True) -> GeneratorSpec:
    """Projectable generator: base part depends on x, fiber part on x and y."""
    xs = [ctx.x(k) for k in range(1, ctx.n + 1)]
    ys = [ctx.y("y", c) for c in ctx.fields["y"].components]

    def poly(atoms, terms=3):
        out = Expr()
        for _ in range(rng.randint(0, terms)):
            t = Expr.const(rational(rng))
            for _ in range(rng.randint(0, 2)):
                t = t * rng.choice(atoms)
            out = out + t
        return out

    base = tuple(poly(xs) if with_base else Expr() for _ in range(ctx.n))
    fiber = {("y", c): poly(xs + ys) for c in ctx.fields["y"].components}
    kind = "projectable" if with_base else "vertical"
    return GeneratorSpec(base, fiber, (), kind, "random")
