"""Built-in field models and their generator catalogs.

Conventions: mostly-minus signature ``eta = diag(1, -1, ..., -1)``, volume
form ``dx1 ^ ... ^ dxn``, coupling ``kappa`` kept as a symbolic constant.
The metric field ``g[a,b]`` stores the contravariant metric; ``glow``,
``sqrtg``, ``Gamma``, ``dGamma`` and ``Ric`` are derived symbols on it.

Field strength: F^i_{mn} = D_m w^i_n - D_n w^i_m + c^i_{jk} w^j_m w^k_n.
Gauge action:   delta w^i_n = D_n chi^i + c^i_{jk} w^j_n chi^k.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from .errors import ModelError
from .jetcalc import GeneratorSpec, total_derivative
from .multiindex import MAX_DIMENSION, MultiIndex
from .symexpr import (DerivedSymbol, Expr, FieldDecl, JetContext, derived_atom, gauss_inverse,
                      jet_atom, metric_symbols, partial)

MODEL_IDS = ("scalar", "maxwell", "yang_mills", "einstein_hilbert", "einstein_yang_mills")
GENERATOR_KINDS = ("translation", "gauge", "horizontal_split", "vertical_split")


# Lie algebra data ---------------------------------------------------------

def su2_structure_constants() -> dict:
    """c^i_{jk} = Levi-Civita epsilon_{ijk}."""
    c = {}
    for i, j, k in product(range(1, 4), repeat=3):
        if len({i, j, k}) == 3:
            c[(i, j, k)] = 1 if (i, j, k) in ((1, 2, 3), (2, 3, 1), (3, 1, 2)) else -1
    return c


def identity_form(dim: int) -> dict:
    return {(i, i): 1 for i in range(1, dim + 1)}


def validate_lie_algebra(dim: int, c: dict, k: dict) -> None:
    """Antisymmetry, Jacobi identity and ad-invariance of ``k``; raises ModelError."""
    get = lambda i, j, l: Fraction(c.get((i, j, l), 0))
    kk = lambda i, j: Fraction(k.get((i, j), 0))
    r = range(1, dim + 1)
    for key in list(c) + list(k):
        if any(not 1 <= v <= dim for v in key):
            raise ModelError(f"structure data index {key} outside 1..{dim}")
    for i, j, l in product(r, repeat=3):
        if get(i, j, l) != -get(i, l, j):
            raise ModelError(f"structure constants not antisymmetric at c^{i}_{j}{l}")
    for i, j in product(r, repeat=2):
        if kk(i, j) != kk(j, i):
            raise ModelError(f"invariant form not symmetric at ({i},{j})")
    for i, a, b, d in product(r, repeat=4):
        s = sum(get(i, a, m) * get(m, b, d) + get(i, b, m) * get(m, d, a) + get(i, d, m) * get(m, a, b)
                for m in r)
        if s:
            raise ModelError(f"Jacobi identity fails for indices ({i},{a},{b},{d})")
    for i, j, l in product(r, repeat=3):
        s = sum(kk(i, m) * get(m, j, l) + kk(j, m) * get(m, i, l) for m in r)
        if s:
            raise ModelError(f"invariant form is not ad-invariant at ({i},{j},{l})")


# metric geometry -----------------------------------------------------------

def _matmul(a, b):
    n = len(a)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = 0
            for k in range(n):
                x, y = a[i][k], b[k][j]
                if isinstance(x, int) and x == 0 or isinstance(y, int) and y == 0:
                    continue
                acc = x * y if isinstance(acc, int) and acc == 0 else acc + x * y
            row.append(acc)
        out.append(row)
    return out


def metric_geometry(lookup, memo, n: int, field_name: str = "g"):
    """Christoffels, their first derivatives and Ricci over any ring.

    Returns ``(Gamma, dGamma, Ric)`` nested lists (0-based), with
    ``Gamma[m][a][b]`` = Gamma^m_{ab}, ``dGamma[m][a][b][t]`` = D_t Gamma^m_{ab}.
    The computation reuses the metric inverse cached in ``memo``.
    """
    key = ("metric-geometry", field_name)
    if key in memo:
        return memo[key]
    zero = MultiIndex.zero(n)
    r = range(n)

    def g_at(a, b, alpha):
        return lookup(jet_atom(field_name, tuple(sorted((a + 1, b + 1))), alpha))

    G = [[g_at(a, b, zero) for b in r] for a in r]
    unit = [MultiIndex.unit(n, s + 1) for s in r]
    Gs = [[[g_at(a, b, unit[s]) for b in r] for a in r] for s in r]
    Gst = {}
    for s in r:
        for t in range(s, n):
            m = [[g_at(a, b, unit[s] + unit[t]) for b in r] for a in r]
            Gst[(s, t)] = Gst[(t, s)] = m
    inv_key = ("metric-inverse", field_name)
    if inv_key not in memo:
        memo[inv_key] = gauss_inverse(G)
    H, _ = memo[inv_key]
    neg = lambda m: [[-v for v in row] for row in m]
    Hs = [neg(_matmul(_matmul(H, Gs[s]), H)) for s in r]
    dH = {}
    for s in r:
        for t in range(s, n):
            a = _matmul(_matmul(Hs[t], Gs[s]), H)
            b = _matmul(_matmul(H, Gst[(s, t)]), H)
            m = [[-(a[i][j] + a[j][i] + b[i][j]) for j in r] for i in r]
            dH[(s, t)] = dH[(t, s)] = m
    half = Fraction(1, 2)
    Gamma = [[[None] * n for _ in r] for _ in r]
    dGamma = [[[[None] * n for _ in r] for _ in r] for _ in r]
    for m in r:
        for a in r:
            for b in range(a, n):
                low = [Hs[a][l][b] + Hs[b][l][a] - Hs[l][a][b] for l in r]
                v = sum((G[m][l] * low[l] for l in r[1:]), G[m][0] * low[0]) * half
                Gamma[m][a][b] = Gamma[m][b][a] = v
                for t in r:
                    dlow = [dH[(t, a)][l][b] + dH[(t, b)][l][a] - dH[(t, l)][a][b] for l in r]
                    w = sum((Gs[t][m][l] * low[l] + G[m][l] * dlow[l] for l in r[1:]),
                            Gs[t][m][0] * low[0] + G[m][0] * dlow[0]) * half
                    dGamma[m][a][b][t] = dGamma[m][b][a][t] = w
    trace = [sum((Gamma[m][v][m] for m in r[1:]), Gamma[0][v][0]) for v in r]
    Ric = [[None] * n for _ in r]
    for a in r:
        for b in range(a, n):
            v = 0
            for m in r:
                v = v + dGamma[m][a][b][m] - dGamma[m][a][m][b] + trace[m] * Gamma[m][a][b]
                for w in r:
                    v = v - Gamma[m][w][b] * Gamma[w][a][m]
            Ric[a][b] = Ric[b][a] = v
    memo[key] = (Gamma, dGamma, Ric)
    return memo[key]


def curvature_symbols(n: int, field_name: str = "g"):
    """Derived symbols ``Gamma[m,a,b]``, ``dGamma[m,a,b,t]`` and ``Ric[a,b]``.

    Partials come from explicit expansions in ``glow`` and metric jets,
    built lazily and cached (they are only needed for symbolic calculus).
    """
    zero = MultiIndex.zero(n)
    units = [MultiIndex.unit(n, s) for s in range(1, n + 1)]
    comps = [(a, b) for a in range(1, n + 1) for b in range(a, n + 1)]
    explicit = {}

    def deps1(args, ctx):
        return {jet_atom(field_name, c, al) for c in comps for al in [zero] + units}

    def deps2(args, ctx):
        second = {u + v for u in units for v in units}
        return deps1(args, ctx) | {jet_atom(field_name, c, al) for c in comps for al in second}

    def glow(ctx, a, b):
        return ctx.derived_sym("glow", a, b)

    def gamma_explicit(args, ctx):
        key = ("Gamma", args)
        if key not in explicit:
            m, a, b = args
            out = Expr()
            for l in range(1, n + 1):
                low = (total_derivative(glow(ctx, l, b), a, ctx) + total_derivative(glow(ctx, l, a), b, ctx)
                       - total_derivative(glow(ctx, a, b), l, ctx))
                out = out + ctx.y(field_name, tuple(sorted((m, l)))) * low
            explicit[key] = out.scale(Fraction(1, 2))
        return explicit[key]

    def dgamma_explicit(args, ctx):
        key = ("dGamma", args)
        if key not in explicit:
            explicit[key] = total_derivative(gamma_explicit(args[:3], ctx), args[3], ctx)
        return explicit[key]

    def ric_explicit(args, ctx):
        key = ("Ric", args)
        if key not in explicit:
            a, b = args
            gam = lambda m, x, y: ctx.derived_sym("Gamma", m, x, y)
            dgam = lambda m, x, y, t: ctx.derived_sym("dGamma", m, x, y, t)
            out = Expr()
            for m in range(1, n + 1):
                out = out + dgam(m, a, b, m) - dgam(m, a, m, b)
                for w in range(1, n + 1):
                    out = out + gam(m, w, m) * gam(w, a, b) - gam(m, w, b) * gam(w, a, m)
            explicit[key] = out
        return explicit[key]

    def rule_from(builder):
        return lambda args, wrt, ctx: partial(builder(args, ctx), wrt, ctx)

    def value_gamma(args, lookup, memo):
        m, a, b = args
        return metric_geometry(lookup, memo, n, field_name)[0][m - 1][a - 1][b - 1]

    def value_dgamma(args, lookup, memo):
        m, a, b, t = args
        return metric_geometry(lookup, memo, n, field_name)[1][m - 1][a - 1][b - 1][t - 1]

    def value_ric(args, lookup, memo):
        a, b = args
        return metric_geometry(lookup, memo, n, field_name)[2][a - 1][b - 1]

    def lower_pair(args):
        return (args[0],) + tuple(sorted(args[1:3])) + args[3:]

    return [
        DerivedSymbol("Gamma", 3, deps1, rule_from(gamma_explicit), value_gamma,
                      canon=lower_pair, index_range=n),
        DerivedSymbol("dGamma", 4, deps2, rule_from(dgamma_explicit), value_dgamma,
                      canon=lower_pair, index_range=n),
        DerivedSymbol("Ric", 2, deps2, rule_from(ric_explicit), value_ric,
                      symmetric_args=True, index_range=n),
    ]


# model assembly ------------------------------------------------------------

@dataclass
class ModelSpec:
    """A built model: context, density and generator catalog."""

    id: str
    n: int
    ctx: JetContext
    lagrangian: Expr
    generators: dict = field(default_factory=dict)
    structure_constants: dict = field(default_factory=dict)
    invariant_form: dict = field(default_factory=dict)
    order_profile: tuple | None = None
    notes: str = ""


def _eta(n):
    return [1] + [-1] * (n - 1)


def field_strength(ctx: JetContext, comp, c: dict, dim: int, name: str):
    """F[(i, m, v)] for m < v, as expressions in the connection jets."""
    n = ctx.n
    F = {}
    for i in range(1, dim + 1):
        for m in range(1, n + 1):
            for v in range(m + 1, n + 1):
                e = ctx.y(name, comp(i, v), (m,)) - ctx.y(name, comp(i, m), (v,))
                for (a, j, k), q in sorted(c.items()):
                    if a == i:
                        e = e + (ctx.y(name, comp(j, m)) * ctx.y(name, comp(k, v))).scale(q)
                F[(i, m, v)] = e
    return F


def _ym_density(ctx, F, k, dim, metric: str | None):
    """-1/4 k_ij F^i_{mn} F^j^{mn}, raising with eta or with the metric field."""
    n = ctx.n
    out = Expr()
    pairs = [(m, v) for m in range(1, n + 1) for v in range(m + 1, n + 1)]
    if metric is None:
        eta = _eta(n)
        for (i, j), q in sorted(k.items()):
            for m, v in pairs:
                out = out + (F[(i, m, v)] * F[(j, m, v)]).scale(Fraction(-1, 2) * q * eta[m - 1] * eta[v - 1])
        return out
    gm = lambda a, b: ctx.y(metric, tuple(sorted((a, b))))
    for (i, j), q in sorted(k.items()):
        for (m, v), (a, b) in product(pairs, pairs):
            raise_ = gm(m, a) * gm(v, b) - gm(m, b) * gm(v, a)
            out = out + (F[(i, m, v)] * F[(j, a, b)] * raise_).scale(Fraction(-1, 2) * q)
    return out * ctx.derived_sym("sqrtg")


def _translations(ctx: JetContext) -> dict:
    out = {}
    for k in range(1, ctx.n + 1):
        base = tuple(Expr.const(1 if s == k else 0) for s in range(1, ctx.n + 1))
        out[f"translation_{k}"] = GeneratorSpec(base, {}, (), "projectable", f"translation_{k}")
    out["translation"] = out["translation_1"]
    return out


def _gauge(ctx, comp, c, dim, name):
    fiber = {}
    for i in range(1, dim + 1):
        for v in range(1, ctx.n + 1):
            e = ctx.y("chi", (i,), (v,))
            for (a, j, k), q in sorted(c.items()):
                if a == i:
                    e = e + (ctx.y(name, comp(j, v)) * ctx.y("chi", (k,))).scale(q)
            fiber[(name, ctx.fields[name].canonical_comp(comp(i, v)))] = e
    return fiber


def _ym_horizontal(ctx, comp, c, dim, name):
    """Fiber part with vertical projection Xi_V = -xi^m F^i_{m v}."""
    fiber = {}
    n = ctx.n
    for i in range(1, dim + 1):
        for v in range(1, n + 1):
            e = Expr()
            for m in range(1, n + 1):
                xi = ctx.y("xi", (m,))
                e = e + xi * ctx.y(name, comp(i, m), (v,))
                for (a, j, k), q in sorted(c.items()):
                    if a == i:
                        e = e - (ctx.y(name, comp(j, m)) * ctx.y(name, comp(k, v)) * xi).scale(q)
            fiber[(name, ctx.fields[name].canonical_comp(comp(i, v)))] = e
    return fiber


def _natural_metric(ctx, metric):
    """Natural lift on the contravariant metric: g^{ac} D_c xi^b + g^{bc} D_c xi^a."""
    n = ctx.n
    gm = lambda a, b: ctx.y(metric, tuple(sorted((a, b))))
    fiber = {}
    for a, b in ctx.fields[metric].components:
        e = Expr()
        for c in range(1, n + 1):
            e = e + gm(a, c) * ctx.y("xi", (b,), (c,)) + gm(b, c) * ctx.y("xi", (a,), (c,))
        fiber[(metric, (a, b))] = e
    return fiber


def _xi_base(ctx):
    return tuple(ctx.y("xi", (s,)) for s in range(1, ctx.n + 1))


def _check_n(n, lo=2):
    if not lo <= n <= MAX_DIMENSION:
        raise ModelError(f"base dimension {n} outside {lo}..{MAX_DIMENSION}")


def _algebra(algebra: str):
    if algebra == "su2":
        return 3, su2_structure_constants(), identity_form(3)
    if algebra == "u1":
        return 1, {}, identity_form(1)
    raise ModelError(f"unknown gauge algebra {algebra!r} (shipped: su2, u1)")


def build_scalar(n: int = 2, mass=0, max_order: int | None = None) -> ModelSpec:
    """L = 1/2 eta^{mn} y_m y_n - 1/2 m^2 y^2."""
    _check_n(n, 1)
    ctx = JetContext(n, [FieldDecl.scalar("y"), FieldDecl.scalar("eta_y", kind="parameter")],
                     max_order or 4)
    eta = _eta(n)
    L = Expr()
    for s in range(1, n + 1):
        L = L + (ctx.y("y", (1,), (s,)) ** 2).scale(Fraction(eta[s - 1], 2))
    m = Fraction(mass)
    if m:
        L = L - (ctx.y("y") ** 2).scale(m * m / 2)
    gens = _translations(ctx)
    gens["vertical_split"] = GeneratorSpec.vertical(ctx, {("y", (1,)): ctx.y("eta_y")}, ("eta_y",),
                                                    "vertical_split")
    return ModelSpec("scalar", n, ctx, L, gens, notes="E = -box y - m^2 y")


def build_maxwell(n: int = 4, max_order: int | None = None) -> ModelSpec:
    """L = -1/4 F_{mn} F^{mn} for a U(1) potential ``A[m]`` on flat space."""
    _check_n(n)
    ctx = JetContext(n, [FieldDecl("A", tuple((m,) for m in range(1, n + 1))),
                         FieldDecl.scalar("chi", kind="parameter"),
                         FieldDecl("xi", tuple((m,) for m in range(1, n + 1)), "parameter")],
                     max_order or 4)
    comp = lambda i, m: (m,)
    F = field_strength(ctx, comp, {}, 1, "A")
    L = _ym_density(ctx, F, identity_form(1), 1, None)
    gens = _translations(ctx)
    gauge = GeneratorSpec.vertical(ctx, _gauge(ctx, comp, {}, 1, "A"), ("chi",), "gauge")
    gens["gauge"] = gauge
    gens["vertical_split"] = gauge
    gens["horizontal_split"] = GeneratorSpec(_xi_base(ctx), _ym_horizontal(ctx, comp, {}, 1, "A"),
                                             ("xi",), "gauge-natural-lift", "horizontal_split")
    return ModelSpec("maxwell", n, ctx, L, gens, {}, identity_form(1),
                     notes="E^m = D_n F^{nm}; gauge: delta A_m = D_m chi")


def build_yang_mills(n: int = 4, algebra: str = "su2", structure_constants=None,
                     invariant_form=None, max_order: int | None = None) -> ModelSpec:
    """Flat-space Yang--Mills for connection components ``w[i,m]``."""
    _check_n(n)
    dim, c, k = _algebra(algebra) if structure_constants is None else (
        max(max(key) for key in structure_constants) if structure_constants else 1,
        structure_constants, invariant_form)
    if k is None:
        k = identity_form(dim)
    validate_lie_algebra(dim, c, k)
    ctx = JetContext(n, [FieldDecl.matrix("w", dim, n),
                         FieldDecl.scalar("chi", m=dim, kind="parameter"),
                         FieldDecl("xi", tuple((m,) for m in range(1, n + 1)), "parameter")],
                     max_order or 4)
    comp = lambda i, m: (i, m)
    F = field_strength(ctx, comp, c, dim, "w")
    L = _ym_density(ctx, F, k, dim, None)
    gens = _translations(ctx)
    gauge = GeneratorSpec.vertical(ctx, _gauge(ctx, comp, c, dim, "w"), ("chi",), "gauge")
    gens["gauge"] = gauge
    gens["vertical_split"] = gauge
    gens["horizontal_split"] = GeneratorSpec(_xi_base(ctx), _ym_horizontal(ctx, comp, c, dim, "w"),
                                             ("xi",), "gauge-natural-lift", "horizontal_split")
    return ModelSpec("yang_mills", n, ctx, L, gens, c, k)


def _metric_fields(n):
    return [FieldDecl.symmetric_tensor("g", n),
            FieldDecl("xi", tuple((m,) for m in range(1, n + 1)), "parameter")]


def _eh_density(ctx: JetContext) -> Expr:
    """-(1/2 kappa) sqrtg g^{ab} Ric_{ab}."""
    n = ctx.n
    s = Expr()
    for a in range(1, n + 1):
        for b in range(a, n + 1):
            t = ctx.y("g", (a, b)) * ctx.derived_sym("Ric", a, b)
            s = s + (t if a == b else t.scale(2))
    return (s * ctx.derived_sym("sqrtg") * ctx.const("kappa") ** -1).scale(Fraction(-1, 2))


def build_einstein_hilbert(n: int = 4, max_order: int | None = None) -> ModelSpec:
    _check_n(n)
    derived = metric_symbols("g", n) + curvature_symbols(n, "g")
    ctx = JetContext(n, _metric_fields(n), max_order or 6, derived, ("kappa",), metric="g")
    L = _eh_density(ctx)
    gens = _translations(ctx)
    gens["horizontal_split"] = GeneratorSpec(_xi_base(ctx), _natural_metric(ctx, "g"), ("xi",),
                                             "gauge-natural-lift", "horizontal_split")
    return ModelSpec("einstein_hilbert", n, ctx, L, gens,
                     notes="second order in g; metric identities checked by exact probing")


def build_einstein_yang_mills(n: int = 4, algebra: str = "su2", max_order: int | None = None) -> ModelSpec:
    _check_n(n)
    dim, c, k = _algebra(algebra)
    validate_lie_algebra(dim, c, k)
    derived = metric_symbols("g", n) + curvature_symbols(n, "g")
    fields = _metric_fields(n) + [FieldDecl.matrix("w", dim, n),
                                  FieldDecl.scalar("chi", m=dim, kind="parameter")]
    ctx = JetContext(n, fields, max_order or 6, derived, ("kappa",), metric="g")
    comp = lambda i, m: (i, m)
    F = field_strength(ctx, comp, c, dim, "w")
    L = _eh_density(ctx) + _ym_density(ctx, F, k, dim, "g")
    gens = _translations(ctx)
    gens["gauge"] = GeneratorSpec.vertical(ctx, _gauge(ctx, comp, c, dim, "w"), ("chi",), "gauge")
    gens["vertical_split"] = gens["gauge"]
    fiber = dict(_natural_metric(ctx, "g"))
    fiber.update(_ym_horizontal(ctx, comp, c, dim, "w"))
    gens["horizontal_split"] = GeneratorSpec(_xi_base(ctx), fiber, ("xi",), "gauge-natural-lift",
                                             "horizontal_split")
    return ModelSpec("einstein_yang_mills", n, ctx, L, gens, c, k, order_profile=(3, 2),
                     notes="metric on J2, connection on J1; gauge-natural order (3, 2)")


_BUILDERS = {
    "scalar": build_scalar,
    "maxwell": build_maxwell,
    "yang_mills": build_yang_mills,
    "einstein_hilbert": build_einstein_hilbert,
    "einstein_yang_mills": build_einstein_yang_mills,
}


def build_model(model_id: str, **params) -> ModelSpec:
    try:
        builder = _BUILDERS[model_id]
    except KeyError:
        raise ModelError(f"unknown model {model_id!r}; choose from {', '.join(MODEL_IDS)}") from None
    return builder(**params)


def catalog_generator(model: ModelSpec, name: str) -> GeneratorSpec:
    try:
        return model.generators[name]
    except KeyError:
        avail = ", ".join(sorted(model.generators))
        raise ModelError(f"model {model.id!r} has no generator {name!r} (available: {avail})") from None
