"""Conservation-law identities checked along random polynomial sections.

For models whose symbolic expansion is impractical (the second-order
Einstein--Hilbert density in four dimensions), the Noether pipeline is run
on Taylor coefficients instead of expressions:

* each dynamical field is a random polynomial near a reference value
  (near Minkowski for the metric);
* the vertical gradient of the density is obtained by reverse-mode
  differentiation of its evaluation graph, so no partial derivative is
  ever expanded symbolically;
* generator parameters stay symbolic as linear forms whose coefficients
  are series; the momenta recursion, Euler--Lagrange operator and the
  superpotential cascade are the same generic routines used symbolically.

A "point" is one section; identities are exact over GF(PRIME).
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import JetvarError
from .jetcalc import GeneratorSpec, vertical_part
from .multiindex import MultiIndex
from .noether import lf_total_derivative, potential_cascade, to_linear_form
from .symexpr import Expr, JetContext, evaluate, gauss_inverse, random_metric, random_rational
from .taylor import (PRIME, Node, Tape, TaylorCalculus, TaylorSpace, TruncationError,
                     rational_reconstruct)
from .variational import euler_from_gradient, kolar_momenta


@dataclass(frozen=True)
class ProbeConfig:
    """Probe parameters; ``degree`` is the Taylor truncation of every series."""

    points: int = 100
    seed: int = 0
    degree: int = 4
    jet_depth: int = 3
    metric_scale: Fraction = Fraction(1, 10)
    field_scale: Fraction = Fraction(1, 2)


class Section:
    """Random polynomial section with exact rational coefficients."""

    def __init__(self, ctx: JetContext, space: TaylorSpace, rng: random.Random, config: ProbeConfig):
        self.ctx, self.space = ctx, space
        self.depth = config.jet_depth
        top = space.degree + config.jet_depth
        monos = [m for m in TaylorSpace.monomials(ctx.n, top) if sum(m)]
        self.poly = {}
        metric = ctx.metric
        if metric is not None:
            g0 = random_metric(ctx.n, rng, config.metric_scale)
            _, det = gauss_inverse(g0)
            space.register_root(det)
        for name, comp in ctx.field_components("field"):
            if name == metric:
                c0 = g0[comp[0] - 1][comp[1] - 1]
                scale = config.metric_scale
            else:
                c0 = random_rational(rng, -1, 1)
                scale = config.field_scale
            coeffs = {(0,) * ctx.n: c0}
            for m in monos:
                coeffs[m] = scale * Fraction(rng.randint(-5, 5), 5 * _factorial_of(m))
            self.poly[(name, comp)] = coeffs
        self.constants = {c: _nonzero_rational(rng) for c in ctx.constants}
        self._cache = {}

    def series(self, atom):
        hit = self._cache.get(atom)
        if hit is not None:
            return hit
        kind = atom[0]
        if kind == "x":
            hit = self.space.coordinate(atom[1])
        elif kind == "c":
            hit = self.constants[atom[1]]
        elif kind == "y":
            alpha = atom[3]
            if alpha.order > self.depth:
                raise TruncationError(f"jet order {alpha.order} exceeds the probe depth {self.depth}")
            poly = self.poly.get((atom[1], atom[2]))
            if poly is None:
                raise JetvarError(f"no section for {atom[1]}{list(atom[2])} (parameter fields stay symbolic)")
            hit = self.space.from_coeffs(_differentiate(poly, alpha))
        else:
            raise JetvarError(f"cannot take a series of atom {atom!r}")
        self._cache[atom] = hit
        return hit

    def evaluate(self, e: Expr, memo=None):
        v = evaluate(e, self.series, self.ctx, {} if memo is None else memo)
        return v if not isinstance(v, (int, Fraction)) else self.space.const(v)


def _factorial_of(m):
    out = 1
    for k in m:
        for j in range(2, k + 1):
            out *= j
    return out


def _nonzero_rational(rng):
    while True:
        q = random_rational(rng)
        if q:
            return q


def _differentiate(poly: dict, alpha: MultiIndex) -> dict:
    out = {}
    for m, q in poly.items():
        if all(a >= b for a, b in zip(m, alpha)):
            f = 1
            for a, b in zip(m, alpha):
                for j in range(b):
                    f *= a - j
            out[tuple(a - b for a, b in zip(m, alpha))] = q * f
    return out


# linear forms with series coefficients -------------------------------------

def lf_add(a: dict, b: dict, sign: int = 1) -> dict:
    out = dict(a)
    for k, v in b.items():
        w = v if sign == 1 else -v
        out[k] = out[k] + w if k in out else w
    return out


def lf_times(f: dict, t) -> dict:
    return {k: v * t for k, v in f.items()}


def lf_is_zero(f: dict) -> bool:
    return all(v.is_zero() for v in f.values())


def lf_derivative_multi(f: dict, alpha: MultiIndex, calc) -> dict:
    for s in alpha.labels():
        f = lf_total_derivative(f, s, calc)
    return f


@dataclass
class PointReport:
    bianchi_zero: bool
    strong_conservation: bool
    cascade_exact: bool
    residual_zero: bool
    nu: dict = field(default_factory=dict)
    ratio: int | None = None
    komar_match: bool | None = None


def density_gradient(L: Expr, ctx: JetContext, section: Section):
    """Series of L and of dL/dy^i_alpha for every dynamical jet atom of L."""
    tape = Tape()
    leaves = {}

    def lookup(atom):
        if atom[0] == "y":
            node = leaves.get(atom)
            if node is None:
                node = leaves[atom] = tape.leaf(section.series(atom))
            return node
        return section.series(atom)

    val = evaluate(L, lookup, ctx, {})
    if not isinstance(val, Node):
        return section.space.const(val) if not hasattr(val, "c") else val, {}
    atoms = sorted(leaves)
    grads = tape.gradient(val, [leaves[a] for a in atoms])
    fields = {f.name for f in ctx.fields.values() if f.kind == "field"}
    dv = {}
    for a, gr in zip(atoms, grads):
        if gr is not None and a[1] in fields:
            dv[((a[1], a[2]), a[3])] = gr
    return val.value, dv


def probe_point(L: Expr, g: GeneratorSpec, ctx: JetContext, section: Section) -> PointReport:
    """Run the current / Bianchi / reduced current / cascade pipeline at one section."""
    space = section.space
    calc = TaylorCalculus(space)
    params = list(g.params)
    if not params:
        raise JetvarError("section probe needs a generator with parameter fields")
    n = ctx.n
    lval, dv = density_gradient(L, ctx, section)

    def series_lf(e: Expr) -> dict:
        if not e.terms:
            return {}
        return {k: section.evaluate(c) for k, c in to_linear_form(e, ctx, params).items()}

    xv = {key: series_lf(e) for key, e in vertical_part(g, ctx).items()}
    base = [series_lf(b) for b in g.base]
    p = kolar_momenta(dv, n, calc)
    d_xv = {}
    eps = [lf_times(base[s], lval) for s in range(n)]
    for (key, beta, sigma), mom in sorted(p.items(), key=lambda kv: (kv[0][0], kv[0][1].sort_key(), kv[0][2])):
        if (key, beta) not in d_xv:
            d_xv[(key, beta)] = lf_derivative_multi(xv[key], beta, calc)
        eps[sigma - 1] = lf_add(eps[sigma - 1], lf_times(d_xv[(key, beta)], mom))
    E = euler_from_gradient(dv, calc)
    work = {}
    for key, e in E.items():
        work = lf_add(work, lf_times(xv.get(key, {}), e), -1)
    beta = euler_from_gradient(work, calc)
    bianchi_zero = all(v.is_zero() for v in beta.values())
    q = kolar_momenta(work, n, calc)
    red = [dict() for _ in range(n)]
    for (a, b, sigma), v in q.items():
        red[sigma - 1][(a, b)] = v
    J = [lf_add(eps[s], red[s], -1) for s in range(n)]
    div = {}
    for s in range(n):
        div = lf_add(div, lf_total_derivative(J[s], s + 1, calc))
    strong = lf_is_zero(div)
    nu, rest = potential_cascade([{k: v for k, v in c.items() if not v.is_zero()} for c in J], calc)
    exact = all(lf_is_zero(c) for c in rest)
    ok = True
    for s in range(1, n + 1):
        acc = {}
        for m in range(1, n + 1):
            if s == m:
                continue
            form = nu.get((min(s, m), max(s, m)), {})
            d = lf_total_derivative(form, m, calc)
            acc = lf_add(acc, lf_times(d, 2 if s < m else -2))
        ok &= lf_is_zero(lf_add(acc, J[s - 1], -1))
    return PointReport(bianchi_zero, strong, exact, ok, nu)


def komar_forms(ctx: JetContext, section: Section, metric: str = "g", param: str = "xi") -> dict:
    """(sqrtg / 4 kappa)(nabla^s xi^m - nabla^m xi^s) as linear forms, s < m."""
    n = ctx.n
    memo = {}
    ev = lambda e: section.evaluate(e, memo)
    sqrtg = ev(ctx.derived_sym("sqrtg"))
    kappa = section.constants.get("kappa", 1)
    pref = sqrtg * Fraction(1, 4) * (1 / Fraction(kappa))
    ginv = lambda a, b: section.series(ctx.jet(metric, tuple(sorted((a, b)))))
    gamma = {}
    for m in range(1, n + 1):
        for a in range(1, n + 1):
            for l in range(a, n + 1):
                gamma[(m, a, l)] = gamma[(m, l, a)] = ev(ctx.derived_sym("Gamma", m, a, l))
    zero = MultiIndex.zero(n)

    def up_nabla(s, m):
        """nabla^s xi^m as a linear form."""
        out = {}
        for a in range(1, n + 1):
            ga = ginv(s, a)
            k = ((param, (m,)), MultiIndex.unit(n, a))
            out[k] = out[k] + ga if k in out else ga
            for l in range(1, n + 1):
                k = ((param, (l,)), zero)
                t = ga * gamma[(m, a, l)]
                out[k] = out[k] + t if k in out else t
        return out

    forms = {}
    for s in range(1, n + 1):
        for m in range(s + 1, n + 1):
            forms[(s, m)] = lf_times(lf_add(up_nabla(s, m), up_nabla(m, s), -1), pref)
    return forms


def proportionality(nu: dict, ref: dict):
    """Residue c with nu = c ref coefficientwise, or None."""
    ratio = None
    for key, form in ref.items():
        for k, v in form.items():
            if v.constant():
                w = nu.get(key, {}).get(k)
                num = w.constant() if w is not None else 0
                ratio = num * pow(v.constant(), -1, PRIME) % PRIME
                break
        if ratio is not None:
            break
    if ratio is None:
        return None
    keys = set(nu) | set(ref)
    for key in keys:
        diff = lf_add(nu.get(key, {}), lf_times(ref.get(key, {}), ratio), -1)
        if not lf_is_zero(diff):
            return None
    return ratio


@dataclass
class ProbeSummary:
    points: int
    bianchi_zero: bool
    strong_conservation: bool
    cascade_exact: bool
    residual_zero: bool
    komar_constant: Fraction | None
    komar_consistent: bool | None
    seconds: float
    failures: list = field(default_factory=list)


def probe_superpotential(L: Expr, g: GeneratorSpec, ctx: JetContext, config: ProbeConfig = ProbeConfig(),
                         komar: bool = False) -> ProbeSummary:
    """Check eps - eps~ = 2 D_m nu^{s m} (and optionally the Komar form) at random sections."""
    t0 = time.perf_counter()
    rng = random.Random(config.seed)
    space = TaylorSpace(ctx.n, config.degree)
    flags = dict(bianchi_zero=True, strong_conservation=True, cascade_exact=True, residual_zero=True)
    ratios = set()
    failures = []
    for i in range(config.points):
        section = Section(ctx, space, rng, config)
        rep = probe_point(L, g, ctx, section)
        for k in flags:
            if not getattr(rep, k):
                flags[k] = False
                failures.append((i, k))
        if komar:
            r = proportionality(rep.nu, komar_forms(ctx, section))
            if r is None:
                failures.append((i, "komar"))
            ratios.add(r)
    const = None
    consistent = None
    if komar:
        consistent = len(ratios) == 1 and None not in ratios
        if consistent:
            const = rational_reconstruct(next(iter(ratios)))
    return ProbeSummary(config.points, *flags.values(), const, consistent,
                        time.perf_counter() - t0, failures)
