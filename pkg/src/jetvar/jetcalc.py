"""Total derivatives, generator prolongation and Lie derivatives on jets.

Densities and currents are stored by their coefficients on the volume
form ``omega = dx1 ^ ... ^ dxn`` and on ``omega_s = d/dx_s -| omega``.
With this convention ``d_H(eps^s omega_s) = (D_s eps^s) omega``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import JetOrderError, JetvarError
from .multiindex import MultiIndex, enumerate_indices
from .symexpr import Expr, JetContext, _mono_mul, _norm_coeff, partial, render_atom, substitute


def _d_atom(a, sigma, ctx: JetContext) -> Expr:
    key = (a, sigma)
    hit = ctx._dtotal_cache.get(key)
    if hit is not None:
        return hit
    kind = a[0]
    if kind == "x":
        hit = Expr.const(1 if a[1] == sigma else 0)
    elif kind == "c":
        hit = Expr()
    elif kind == "y":
        hit = Expr.atom(_raise(a, sigma, ctx))
    else:
        hit = Expr()
        for dep in sorted(ctx.derived_dependencies(a)):
            r = ctx.derived_partial(a, dep)
            if r.terms:
                hit = hit + r * Expr.atom(_raise(dep, sigma, ctx))
    ctx._dtotal_cache[key] = hit
    return hit


def _raise(a, sigma, ctx):
    alpha = a[3] + MultiIndex.unit(ctx.n, sigma)
    if alpha.order > ctx.max_order:
        raise JetOrderError(
            f"D_{sigma} of {render_atom(a)} needs order {alpha.order} above the cap {ctx.max_order}")
    return ("y", a[1], a[2], alpha)


def total_derivative(e: Expr, sigma: int, ctx: JetContext) -> Expr:
    """D_sigma e = d_sigma e + sum y^j_(a+sigma) d e / d y^j_a (with chain rule)."""
    if not 1 <= sigma <= ctx.n:
        raise JetvarError(f"base label {sigma} outside 1..{ctx.n}")
    acc = {}
    slow = Expr()
    for mono, c in e.terms.items():
        for idx, (a, k) in enumerate(mono):
            kind = a[0]
            if kind == "c" or (kind == "x" and a[1] != sigma):
                continue
            rest = mono[:idx] + (((a, k - 1),) if k != 1 else ()) + mono[idx + 1:]
            if kind == "y":
                m = _mono_mul(rest, ((_raise(a, sigma, ctx), 1),))
            elif kind == "x":
                m = rest
            else:
                slow = slow + Expr({rest: c * k}) * _d_atom(a, sigma, ctx)
                continue
            v = acc.get(m, 0) + c * k
            if v:
                acc[m] = v
            else:
                del acc[m]
    return Expr({m: _norm_coeff(v) for m, v in acc.items()}) + slow


class ExprCalculus:
    """Coefficient ring of symbolic expressions with total derivatives.

    Generic algorithms (momenta recursion, IBP cascades) are written against
    this small interface so that they also run on truncated Taylor series.
    """

    def __init__(self, ctx: JetContext):
        self.ctx = ctx
        self.n = ctx.n

    def D(self, e, sigma):
        return total_derivative(e, sigma, self.ctx)

    @staticmethod
    def is_zero(e) -> bool:
        return not e.terms

    @staticmethod
    def scale(e, q):
        return e.scale(q)

    zero = staticmethod(Expr)


def total_derivative_multi(e: Expr, alpha: MultiIndex, ctx: JetContext) -> Expr:
    """Iterated total derivative D_alpha e."""
    for sigma in alpha.labels():
        e = total_derivative(e, sigma, ctx)
    return e


def divergence(components, ctx: JetContext) -> Expr:
    out = Expr()
    for sigma, c in enumerate(components, start=1):
        if c.terms:
            out = out + total_derivative(c, sigma, ctx)
    return out


def jet_support(e: Expr, ctx: JetContext, kind: str | None = "field") -> set:
    """Jet atoms ``e`` depends on, including through derived symbols."""
    out = set()
    for a in e.atoms():
        if a[0] == "y":
            out.add(a)
        elif a[0] == "d":
            out.update(ctx.derived_dependencies(a))
    if kind is not None:
        out = {a for a in out if ctx.fields[a[1]].kind == kind}
    return out


@dataclass(frozen=True)
class GeneratorSpec:
    """Projectable generator: base part ``xi^sigma`` and fiber part ``Xi^i``.

    ``fiber`` maps ``(field name, component)`` to an Expr; absent entries
    are zero.  ``params`` names parameter fields (declared in the context
    with kind ``"parameter"``) that the components depend on linearly.
    """

    base: tuple
    fiber: dict = field(default_factory=dict)
    params: tuple = ()
    kind: str = "projectable"
    name: str = ""

    def __post_init__(self):
        if self.kind not in ("projectable", "vertical", "gauge-natural-lift"):
            raise JetvarError(f"unknown generator kind {self.kind!r}")
        if self.kind == "vertical" and any(b.terms for b in self.base):
            raise JetvarError("vertical generator with nonzero base components")

    @staticmethod
    def zero(ctx: JetContext, name="zero") -> "GeneratorSpec":
        return GeneratorSpec(tuple(Expr() for _ in range(ctx.n)), {}, (), "vertical", name)

    @staticmethod
    def vertical(ctx: JetContext, fiber: dict, params=(), name="") -> "GeneratorSpec":
        return GeneratorSpec(tuple(Expr() for _ in range(ctx.n)), dict(fiber), tuple(params),
                             "vertical", name)

    def is_zero(self) -> bool:
        return not any(b.terms for b in self.base) and not any(v.terms for v in self.fiber.values())


@dataclass(frozen=True)
class Current:
    """Coefficients ``eps^sigma`` of ``eps^sigma omega_sigma``."""

    components: tuple

    def divergence(self, ctx: JetContext) -> Expr:
        return divergence(self.components, ctx)

    def __sub__(self, other):
        return Current(tuple(a - b for a, b in zip(self.components, other.components)))

    def is_zero(self) -> bool:
        return not any(c.terms for c in self.components)


def vertical_part(g: GeneratorSpec, ctx: JetContext) -> dict:
    """(Xi_V)^i = Xi^i - y^i_sigma xi^sigma for every dynamical field component."""
    out = {}
    for name, comp in ctx.field_components("field"):
        v = g.fiber.get((name, comp), Expr())
        for sigma, xi in enumerate(g.base, start=1):
            if xi.terms:
                v = v - ctx.y(name, comp, (sigma,)) * xi
        out[(name, comp)] = v
    return out


@dataclass(frozen=True)
class Prolongation:
    vertical: dict
    horizontal: tuple


def prolong_generator(g: GeneratorSpec, s: int, ctx: JetContext) -> Prolongation:
    """Vertical components D_alpha (Xi_V)^i for |alpha| <= s, plus xi^sigma."""
    xv = vertical_part(g, ctx)
    table = {}
    for key, v in xv.items():
        for alpha in enumerate_indices(ctx.n, s):
            table[(key, alpha)] = total_derivative_multi(v, alpha, ctx)
    return Prolongation(table, g.base)


class _ProlongCache:
    """Lazily computed D_alpha (Xi_V)^i, built by extending lower orders."""

    def __init__(self, xv: dict, ctx: JetContext):
        self.ctx = ctx
        self.table = {(k, MultiIndex.zero(ctx.n)): v for k, v in xv.items()}

    def get(self, key, alpha: MultiIndex) -> Expr:
        hit = self.table.get((key, alpha))
        if hit is None:
            labels = alpha.labels()
            lower = MultiIndex.from_labels(self.ctx.n, labels[:-1])
            hit = total_derivative(self.get(key, lower), labels[-1], self.ctx)
            self.table[(key, alpha)] = hit
        return hit


def lie_derivative_density(L: Expr, g: GeneratorSpec, ctx: JetContext) -> Expr:
    """sum D_alpha((Xi_V)^i) dL/dy^i_alpha + D_sigma(xi^sigma L)."""
    xv = vertical_part(g, ctx)
    cache = _ProlongCache(xv, ctx)
    out = Expr()
    for a in sorted(jet_support(L, ctx, "field")):
        key = (a[1], a[2])
        if not xv[key].terms:
            continue
        out = out + cache.get(key, a[3]) * partial(L, a, ctx)
    for sigma, xi in enumerate(g.base, start=1):
        if xi.terms:
            out = out + total_derivative(xi * L, sigma, ctx)
    return out


def lie_derivative_section(gamma: dict, g: GeneratorSpec, ctx: JetContext) -> dict:
    """(Lie_Xi gamma)^i = xi^sigma d_sigma gamma^i - Xi^i(j gamma).

    ``gamma`` maps dynamical field components to expressions in the base
    coordinates (parameter fields may appear and are left untouched).
    """
    bindings = {}
    needed = set()
    for v in list(g.fiber.values()) + list(g.base):
        needed |= jet_support(v, ctx, "field")
    for a in needed:
        bindings[a] = total_derivative_multi(gamma[(a[1], a[2])], a[3], ctx)
    out = {}
    for key, gv in gamma.items():
        v = -substitute(g.fiber.get(key, Expr()), bindings)
        for sigma, xi in enumerate(g.base, start=1):
            if xi.terms:
                v = v + substitute(xi, bindings) * total_derivative(gv, sigma, ctx)
        out[key] = v
    return out
