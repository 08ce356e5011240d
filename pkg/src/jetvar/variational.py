"""Euler--Lagrange operator, momenta, linearization, adjoints, Jacobi.

Source forms are dicts ``{(field, comp): Expr}`` (coefficients of
``theta^i ^ omega``).  Vertical gradients and momenta are dicts keyed by
``(field key, alpha)`` and ``(field key, beta, mu)``; absent keys are zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import JetvarError
from .jetcalc import (Current, ExprCalculus, GeneratorSpec, _ProlongCache, divergence, jet_support,
                      lie_derivative_density, total_derivative,
                      total_derivative_multi, vertical_part)
from .multiindex import MultiIndex, multinomial, of_order, splits
from .symexpr import Expr, FieldDecl, JetContext, partial


def _components(ctx: JetContext, fields):
    if fields is None:
        return ctx.field_components("field")
    if isinstance(fields, str):
        return ctx.field_components(fields)
    return ctx.field_components(None, names=set(fields))


def vertical_gradient(L: Expr, ctx: JetContext, fields=None) -> dict:
    """Nonzero entries of (d_V lambda)^alpha_i = dL / dy^i_alpha."""
    keys = set(_components(ctx, fields))
    out = {}
    for a in sorted(jet_support(L, ctx, None)):
        key = (a[1], a[2])
        if key in keys:
            d = partial(L, a, ctx)
            if d.terms:
                out[(key, a[3])] = d
    return out


def euler_lagrange(L: Expr, ctx: JetContext, fields=None) -> dict:
    """E_i = sum_alpha (-1)^|alpha| D_alpha (d_V lambda)^alpha_i.

    ``fields`` selects the varied fields: None for the dynamical fields,
    ``"parameter"``/``"field"`` for a kind, or an iterable of field names
    (the extended-context use).
    """
    grad = vertical_gradient(L, ctx, fields)
    out = {key: Expr() for key in _components(ctx, fields)}
    for (key, alpha), d in grad.items():
        term = total_derivative_multi(d, alpha, ctx)
        out[key] = out[key] + (term if alpha.order % 2 == 0 else -term)
    return out


def kolar_momenta(grad: dict, n: int, calc) -> dict:
    """Symmetric-split momenta from a vertical gradient over any coefficient ring.

    Top level: p^{beta mu} = w (d_V)^alpha for beta + mu = alpha, |alpha| = s;
    below: p^{beta mu} = w ((d_V)^alpha - D_nu p^{alpha nu}), where
    ``w = alpha_mu / |alpha|``.  ``grad`` maps ``(key, alpha)`` to
    coefficients; the result maps ``(key, beta, mu)``.
    """
    by_key = {}
    for (key, alpha), d in grad.items():
        by_key.setdefault(key, {})[alpha] = d
    out = {}
    for key in sorted(by_key):
        table = by_key[key]
        s = max(a.order for a in table)
        for k in range(s, 0, -1):
            for alpha in of_order(n, k):
                q = table.get(alpha)
                for nu in range(1, n + 1):
                    p = out.get((key, alpha, nu))
                    if p is not None:
                        dp = calc.D(p, nu)
                        q = -dp if q is None else q - dp
                if q is None or calc.is_zero(q):
                    continue
                for beta, mu, w in splits(alpha):
                    t = calc.scale(q, w)
                    k2 = (key, beta, mu)
                    out[k2] = out[k2] + t if k2 in out else t
    return {k: v for k, v in out.items() if not calc.is_zero(v)}


def euler_from_gradient(grad: dict, calc) -> dict:
    """E_key = sum_alpha (-1)^|alpha| D_alpha grad[(key, alpha)] over any ring."""
    out = {}
    for (key, alpha), d in grad.items():
        term = d
        for sigma in alpha.labels():
            term = calc.D(term, sigma)
        if alpha.order % 2:
            term = calc.scale(term, -1)
        out[key] = out[key] + term if key in out else term
    return out


def momenta(L: Expr, ctx: JetContext, fields=None) -> dict:
    """Kolar momenta p^{beta mu}_i of ``L`` with symmetric splits.

    Order-0 densities give an empty table.
    """
    return kolar_momenta(vertical_gradient(L, ctx, fields), ctx.n, ExprCalculus(ctx))


def euler_lagrange_from_momenta(L: Expr, ctx: JetContext, fields=None) -> dict:
    """Closure E_i = (d_V lambda)_i - D_nu p^{0 nu}_i."""
    grad = vertical_gradient(L, ctx, fields)
    p = momenta(L, ctx, fields)
    zero = MultiIndex.zero(ctx.n)
    out = {}
    for key in _components(ctx, fields):
        e = grad.get((key, zero), Expr())
        for nu in range(1, ctx.n + 1):
            q = p.get((key, zero, nu))
            if q is not None:
                e = e - total_derivative(q, nu, ctx)
        out[key] = e
    return out


def pair(source: dict, eta: dict) -> Expr:
    """<E, eta> = sum_i E_i eta^i."""
    out = Expr()
    for key, e in source.items():
        v = eta.get(key)
        if v is not None and e.terms and v.terms:
            out = out + e * v
    return out


def current(L: Expr, g: GeneratorSpec, ctx: JetContext):
    """eps^sigma = sum p^{beta sigma}_i D_beta (Xi_V)^i + xi^sigma L."""
    p = momenta(L, ctx)
    cache = _ProlongCache(vertical_part(g, ctx), ctx)
    comps = [g.base[s].__mul__(L) if g.base[s].terms else Expr() for s in range(ctx.n)]
    for (key, beta, sigma), mom in sorted(p.items(), key=lambda kv: (kv[0][0], kv[0][1].sort_key(), kv[0][2])):
        d = cache.get(key, beta)
        if d.terms:
            comps[sigma - 1] = comps[sigma - 1] + mom * d
    return Current(tuple(comps))


def first_variation_residual(L: Expr, g: GeneratorSpec, ctx: JetContext) -> Expr:
    """Lie_g lambda - <E(lambda), Xi_V> - D_sigma eps^sigma (identically zero)."""
    lie = lie_derivative_density(L, g, ctx)
    work = pair(euler_lagrange(L, ctx), vertical_part(g, ctx))
    return lie - work - current(L, g, ctx).divergence(ctx)


def is_divergence(e: Expr, ctx: JetContext) -> bool:
    """True iff ``e`` is a total divergence: its EL over every field vanishes."""
    el = euler_lagrange(e, ctx, fields=list(ctx.fields))
    return all(not v.terms for v in el.values())


@dataclass(frozen=True)
class LinearDiffOperator:
    """(K eta)_i = sum_{j, alpha} W[(i, j, alpha)] D_alpha eta^j."""

    coeffs: dict = field(default_factory=dict)
    inputs: str = "variation"

    def __post_init__(self):
        object.__setattr__(self, "coeffs", {k: v for k, v in self.coeffs.items() if v.terms})

    def apply(self, eta: dict, ctx: JetContext) -> dict:
        out = {}
        cache = {}
        for (i, j, alpha), w in self.coeffs.items():
            v = eta.get(j)
            if v is None or not v.terms:
                continue
            d = cache.get((j, alpha))
            if d is None:
                d = cache[(j, alpha)] = total_derivative_multi(v, alpha, ctx)
            out[i] = out.get(i, Expr()) + w * d
        return out

    def is_zero(self) -> bool:
        return not self.coeffs

    def __sub__(self, other):
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, Expr()) - v
        return LinearDiffOperator(out, self.inputs)

    def __eq__(self, other):
        if not isinstance(other, LinearDiffOperator):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))


def linearize(delta: dict, ctx: JetContext, fields=None) -> LinearDiffOperator:
    """W^beta_{ij} = d Delta_i / d y^j_beta."""
    keys = set(_components(ctx, fields))
    coeffs = {}
    for i, d in delta.items():
        for a in sorted(jet_support(d, ctx, None)):
            j = (a[1], a[2])
            if j in keys:
                w = partial(d, a, ctx)
                if w.terms:
                    coeffs[(i, j, a[3])] = w
    return LinearDiffOperator(coeffs)


def formal_adjoint(K: LinearDiffOperator, ctx: JetContext) -> LinearDiffOperator:
    """(K* zeta)_j = sum (-1)^|alpha| D_alpha (W^alpha_{ij} zeta^i), in coefficient form.

    Coefficient of D_mu zeta^i is
    sum_{alpha >= mu} (-1)^|alpha| (alpha!/(mu!(alpha-mu)!)) D_{alpha-mu} W^alpha_{ij}.
    """
    out = {}
    for (i, j, alpha), w in K.coeffs.items():
        sign = -1 if alpha.order % 2 else 1
        for mu in _sub_indices(alpha):
            rest = alpha - mu
            c = multinomial(mu, rest) * sign
            term = total_derivative_multi(w, rest, ctx).scale(c)
            key = (j, i, mu)
            out[key] = out.get(key, Expr()) + term
    return LinearDiffOperator(out, K.inputs)


def _sub_indices(alpha: MultiIndex):
    from itertools import product
    for counts in product(*(range(c + 1) for c in alpha)):
        yield MultiIndex(counts)


def helmholtz(delta: dict, ctx: JetContext, fields=None) -> LinearDiffOperator:
    """K_Delta - (K_Delta)*; zero iff Delta is locally variational."""
    K = linearize(delta, ctx, fields)
    return K - formal_adjoint(K, ctx)


def _as_variation(eta, ctx):
    if isinstance(eta, GeneratorSpec):
        return vertical_part(eta, ctx)
    return dict(eta)


def jacobi(L: Expr, eta, ctx: JetContext) -> dict:
    """Jacobi operator J(eta)_i = (K_{E(lambda)} eta)_i."""
    return linearize(euler_lagrange(L, ctx), ctx).apply(_as_variation(eta, ctx), ctx)


def lie_derivative_source(delta: dict, g: GeneratorSpec, ctx: JetContext) -> dict:
    """Variational Lie derivative of a source form.

    Only the vertical part contributes on source-form classes:
    (L Delta)_i = pr Xi_V (Delta_i) + sum (-1)^|a| D_a (Delta_j dXi_V^j / dy^i_a).
    """
    xv = vertical_part(g, ctx)
    cache = _ProlongCache(xv, ctx)
    out = {}
    for i, d in delta.items():
        v = Expr()
        for a in sorted(jet_support(d, ctx, "field")):
            xa = cache.get((a[1], a[2]), a[3])
            if xa.terms:
                v = v + xa * partial(d, a, ctx)
        out[i] = v
    for j, q in xv.items():
        dj = delta.get(j)
        if dj is None or not dj.terms:
            continue
        for a in sorted(jet_support(q, ctx, "field")):
            i = (a[1], a[2])
            t = total_derivative_multi(dj * partial(q, a, ctx), a[3], ctx)
            out[i] = out.get(i, Expr()) + (-t if a[3].order % 2 else t)
    return out


def formal_variation(alpha, gens, ctx: JetContext):
    """Iterated variational Lie derivative, innermost generator last in ``gens``."""
    for g in reversed(list(gens)):
        if isinstance(alpha, Expr):
            alpha = lie_derivative_density(alpha, g, ctx)
        else:
            alpha = lie_derivative_source(alpha, g, ctx)
    return alpha


def second_variation_pair(L: Expr, g: GeneratorSpec, ctx: JetContext):
    """Two routes to the second variation; equal modulo a total divergence.

    (a) <J(Xi_V), Xi_V> + <E, pr Xi_V (Xi_V)>, i.e. Xi_V -| E(Xi_V -| E(lambda))
        rewritten through the linearization (the second term vanishes when
        Xi_V does not depend on the fields, e.g. abstract variations);
    (b) the iterated Lie derivative of lambda along g.
    """
    xv = vertical_part(g, ctx)
    vert = GeneratorSpec.vertical(ctx, xv)
    accel = {k: lie_derivative_density(v, vert, ctx) for k, v in xv.items()}
    route_a = pair(jacobi(L, g, ctx), xv) + pair(euler_lagrange(L, ctx), accel)
    route_b = formal_variation(L, [g, g], ctx)
    return route_a, route_b


def jacobi_coefficients(L: Expr, ctx: JetContext) -> dict:
    """psi^{mu nu}_{ij} entering the kernel condition.

    psi^{mu nu}_{ij} = sum_{|a| <= s-|mu|} (-1)^{|mu+a|} ((mu+a)!/(mu! a!))
                       D_a (d^{mu+a}_i d^nu_j L),
    so that J(eta)_i = sum psi^{mu nu}_{ij} D_{mu+nu} eta^j.
    """
    grad = vertical_gradient(L, ctx)
    hess = {}
    for (i, sig), d in grad.items():
        for a in sorted(jet_support(d, ctx, "field")):
            h = partial(d, a, ctx)
            if h.terms:
                hess[(i, sig, (a[1], a[2]), a[3])] = h
    out = {}
    for (i, sig, j, nu), h in hess.items():
        sign = -1 if sig.order % 2 else 1
        for mu in _sub_indices(sig):
            rest = sig - mu
            term = total_derivative_multi(h, rest, ctx).scale(multinomial(mu, rest) * sign)
            key = (i, j, mu, nu)
            out[key] = out.get(key, Expr()) + term
    return {k: v for k, v in out.items() if v.terms}


def variation_context(ctx: JetContext, prefix: str = "eta"):
    """Extend ``ctx`` with one parameter field per dynamical field.

    Returns the extended context and the variation ``{field key: Expr}``
    pairing each component with its abstract counterpart.
    """
    extra = []
    for f in ctx.fields.values():
        if f.kind == "field":
            extra.append(FieldDecl(f"{prefix}_{f.name}", f.components, "parameter", f.symmetric))
    ext = ctx.with_fields(extra)
    eta = {(f.name, c): ext.y(f"{prefix}_{f.name}", c)
           for f in ctx.fields.values() if f.kind == "field" for c in f.components}
    return ext, eta
