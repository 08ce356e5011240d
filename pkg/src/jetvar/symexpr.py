"""Exact symbolic expressions over base coordinates, jets and derived symbols.

An :class:`Expr` is a sparse polynomial (Laurent in invertible derived
symbols) with exact rational coefficients.  Atoms are plain tuples so that
hashing and ordering stay cheap:

* ``("x", sigma)`` -- base coordinate ``x[sigma]``
* ``("y", name, comp, alpha)`` -- jet coordinate of field component
  ``name[comp]`` differentiated by the multi-index ``alpha``
* ``("c", name)`` -- a named constant (kappa, a mass, ...)
* ``("d", name, args)`` -- an opaque derived symbol (sqrtg, glow[mu,nu])

Expressions are always stored in canonical form; :func:`normalize` exists
for API symmetry and returns its argument.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt
from typing import Callable

import mpmath

from .errors import (JetOrderError, SingularDerived, UnboundCoordinate,
                     UndeclaredCoordinate, JetvarError)
from .multiindex import MAX_DIMENSION, MultiIndex

MP_DIGITS = 50


def _mono_mul(a, b):
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for atom, k in b:
        v = d.get(atom, 0) + k
        if v:
            d[atom] = v
        else:
            del d[atom]
    return tuple(sorted(d.items()))


def _norm_coeff(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


class Expr:
    """Canonical sum of rational multiples of monomials."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms=None):
        self.terms = terms if terms is not None else {}
        self._hash = None

    # construction ---------------------------------------------------
    @staticmethod
    def const(q) -> "Expr":
        q = _norm_coeff(Fraction(q))
        return Expr({(): q}) if q else Expr()

    @staticmethod
    def atom(a, power: int = 1) -> "Expr":
        return Expr({((a, power),): 1})

    @staticmethod
    def lift(v) -> "Expr":
        if isinstance(v, Expr):
            return v
        if isinstance(v, (int, Fraction)):
            return Expr.const(v)
        raise TypeError(f"cannot convert {type(v).__name__} to Expr")

    # arithmetic -----------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, Expr):
            if isinstance(other, (int, Fraction)):
                other = Expr.const(other)
            else:
                return NotImplemented
        if not other.terms:
            return self
        if not self.terms:
            return other
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = _norm_coeff(v)
            else:
                del out[m]
        return Expr(out)

    __radd__ = __add__

    def __neg__(self):
        return Expr({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, Expr):
            if isinstance(other, (int, Fraction)):
                other = Expr.const(other)
            else:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, q) -> "Expr":
        if not q:
            return Expr()
        if q == 1:
            return self
        return Expr({m: _norm_coeff(c * q) for m, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, Expr):
            return NotImplemented
        if not self.terms or not other.terms:
            return Expr()
        if len(other.terms) > len(self.terms):
            self, other = other, self
        out = {}
        for m2, c2 in other.terms.items():
            for m1, c1 in self.terms.items():
                m = _mono_mul(m1, m2)
                v = out.get(m, 0) + c1 * c2
                if v:
                    out[m] = v
                else:
                    del out[m]
        return Expr({m: _norm_coeff(c) for m, c in out.items()})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            if len(self.terms) != 1:
                raise JetvarError("negative powers only of single monomials")
            (m, c), = self.terms.items()
            return Expr({tuple((a, e * k) for a, e in m): _norm_coeff(Fraction(c) ** k)})
        out = Expr.const(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(Fraction(1) / Fraction(other))
        if isinstance(other, Expr):
            return self * (other ** -1)
        return NotImplemented

    # comparison -----------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Expr.const(other)
        if not isinstance(other, Expr):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self):
        return len(self.terms)

    def __repr__(self):
        return f"Expr({render_text(self)!r})"

    __str__ = lambda self: render_text(self)

    # inspection -----------------------------------------------------
    def atoms(self) -> set:
        return {a for m in self.terms for a, _ in m}

    def constant_value(self):
        """The value if the expression is a pure number, else None."""
        if not self.terms:
            return Fraction(0)
        if len(self.terms) == 1 and () in self.terms:
            return Fraction(self.terms[()])
        return None

    def max_jet_order(self, names=None) -> int:
        best = -1
        for a in self.atoms():
            if a[0] == "y" and (names is None or a[1] in names):
                best = max(best, a[3].order)
        return best


def normalize(e: Expr) -> Expr:
    return e


# atoms ----------------------------------------------------------------

def base_atom(sigma: int):
    return ("x", sigma)


def jet_atom(name: str, comp, alpha: MultiIndex):
    return ("y", name, tuple(comp), alpha)


def const_atom(name: str):
    return ("c", name)


def derived_atom(name: str, args=()):
    return ("d", name, tuple(args))


def is_jet(a) -> bool:
    return a[0] == "y"


def with_alpha(a, alpha: MultiIndex):
    return ("y", a[1], a[2], alpha)


# declarations ---------------------------------------------------------

@dataclass(frozen=True)
class FieldDecl:
    """A (possibly multi-component) field or generator parameter.

    ``kind`` is ``"field"`` for dynamical fields and ``"parameter"`` for
    abstract generator parameters promoted to variables with jets.
    ``symmetric`` marks two-index fields stored with sorted indices.
    """

    name: str
    components: tuple
    kind: str = "field"
    symmetric: bool = False

    def canonical_comp(self, comp) -> tuple:
        comp = tuple(int(c) for c in comp)
        if self.symmetric:
            comp = tuple(sorted(comp))
        if comp not in self.components:
            raise UndeclaredCoordinate(f"{self.name}{list(comp)} is not a declared component")
        return comp

    @staticmethod
    def scalar(name, m=1, kind="field"):
        return FieldDecl(name, tuple((i,) for i in range(1, m + 1)), kind)

    @staticmethod
    def symmetric_tensor(name, n, kind="field"):
        comps = tuple((a, b) for a in range(1, n + 1) for b in range(a, n + 1))
        return FieldDecl(name, comps, kind, symmetric=True)

    @staticmethod
    def matrix(name, rows, cols, kind="field"):
        comps = tuple((a, b) for a in range(1, rows + 1) for b in range(1, cols + 1))
        return FieldDecl(name, comps, kind)


@dataclass(frozen=True)
class DerivedSymbol:
    """Opaque function of jet coordinates with a differentiation rule.

    ``dependencies(args, ctx)`` lists the jet atoms the symbol depends on;
    ``rule(args, wrt, ctx)`` returns the partial derivative as an Expr;
    ``value(args, lookup, memo)`` evaluates it given values of its
    dependencies (``lookup`` maps atoms to ring elements).
    """

    name: str
    arity: int
    dependencies: Callable
    rule: Callable
    value: Callable
    invertible: bool = False
    symmetric_args: bool = False
    canon: Callable | None = None
    index_range: int | None = None

    def canonical_args(self, args):
        args = tuple(int(a) for a in args)
        if len(args) != self.arity:
            raise UndeclaredCoordinate(f"{self.name} takes {self.arity} indices, got {len(args)}")
        if self.index_range is not None and any(not 1 <= a <= self.index_range for a in args):
            raise UndeclaredCoordinate(f"{self.name}{list(args)} has an index outside 1..{self.index_range}")
        if self.canon is not None:
            return self.canon(args)
        return tuple(sorted(args)) if self.symmetric_args else args


class JetContext:
    """A single chart: base dimension, fields, order cap, derived symbols."""

    def __init__(self, n: int, fields, max_order: int, derived=(), constants=(),
                 metric: str | None = None):
        if not 1 <= n <= MAX_DIMENSION:
            raise JetvarError(f"base dimension {n} outside 1..{MAX_DIMENSION}")
        if max_order < 0:
            raise JetvarError("max_order must be non-negative")
        self.n = n
        self.fields = {f.name: f for f in fields}
        self.max_order = max_order
        self.derived = {d.name: d for d in derived}
        self.constants = tuple(constants)
        self.metric = metric
        self._partial_cache = {}
        self._dtotal_cache = {}
        if metric is not None and metric not in self.fields:
            raise JetvarError(f"metric field {metric!r} not declared")

    def with_max_order(self, max_order: int) -> "JetContext":
        return JetContext(self.n, list(self.fields.values()), max_order,
                          list(self.derived.values()), self.constants, self.metric)

    def with_fields(self, extra) -> "JetContext":
        fields = list(self.fields.values())
        have = {f.name for f in fields}
        fields += [f for f in extra if f.name not in have]
        return JetContext(self.n, fields, self.max_order, list(self.derived.values()),
                          self.constants, self.metric)

    # builders -------------------------------------------------------
    def multi(self, alpha) -> MultiIndex:
        if alpha is None:
            return MultiIndex.zero(self.n)
        if isinstance(alpha, MultiIndex):
            if len(alpha) != self.n:
                raise UndeclaredCoordinate(f"multi-index {alpha} has wrong dimension")
            return alpha
        return MultiIndex.from_labels(self.n, alpha)

    def jet(self, name, comp=(1,), alpha=None):
        """Atom of ``name[comp]`` differentiated by ``alpha``.

        ``alpha`` is a MultiIndex or an iterable of 1-based base labels.
        """
        decl = self.fields.get(name)
        if decl is None:
            raise UndeclaredCoordinate(f"unknown field {name!r}")
        if isinstance(comp, int):
            comp = (comp,)
        atom = jet_atom(name, decl.canonical_comp(comp), self.multi(alpha))
        self.check_order(atom)
        return atom

    def y(self, name, comp=(1,), alpha=None) -> Expr:
        return Expr.atom(self.jet(name, comp, alpha))

    def x(self, sigma: int) -> Expr:
        if not 1 <= sigma <= self.n:
            raise UndeclaredCoordinate(f"x[{sigma}] outside 1..{self.n}")
        return Expr.atom(base_atom(sigma))

    def const(self, name: str) -> Expr:
        if name not in self.constants:
            raise UndeclaredCoordinate(f"unknown constant {name!r}")
        return Expr.atom(const_atom(name))

    def derived_sym(self, name, *args) -> Expr:
        sym = self.derived.get(name)
        if sym is None:
            raise UndeclaredCoordinate(f"unknown derived symbol {name!r}")
        return Expr.atom(derived_atom(name, sym.canonical_args(args)))

    def field_components(self, kind: str | None = "field", names=None) -> list:
        out = []
        for f in self.fields.values():
            if kind is not None and f.kind != kind:
                continue
            if names is not None and f.name not in names:
                continue
            out.extend((f.name, c) for c in f.components)
        return out

    # validation -----------------------------------------------------
    def check_order(self, atom):
        if atom[0] == "y" and atom[3].order > self.max_order:
            raise JetOrderError(
                f"jet coordinate {render_atom(atom)} has order {atom[3].order} "
                f"above the cap {self.max_order}")

    def check_atom(self, atom):
        kind = atom[0]
        if kind == "x":
            if not 1 <= atom[1] <= self.n:
                raise UndeclaredCoordinate(f"x[{atom[1]}] outside 1..{self.n}")
        elif kind == "y":
            decl = self.fields.get(atom[1])
            if decl is None or atom[2] not in decl.components or len(atom[3]) != self.n:
                raise UndeclaredCoordinate(f"undeclared coordinate {render_atom(atom)}")
            self.check_order(atom)
        elif kind == "c":
            if atom[1] not in self.constants:
                raise UndeclaredCoordinate(f"unknown constant {atom[1]!r}")
        elif kind == "d":
            if atom[1] not in self.derived:
                raise UndeclaredCoordinate(f"unknown derived symbol {atom[1]!r}")
        else:
            raise UndeclaredCoordinate(f"malformed atom {atom!r}")

    def check_expr(self, e: Expr) -> Expr:
        for m in e.terms:
            for a, k in m:
                self.check_atom(a)
                if k < 0 and not (a[0] == "c" or a[0] == "d" and self.derived[a[1]].invertible):
                    raise JetvarError(f"negative power of non-invertible {render_atom(a)}")
        return e

    # derived symbol calculus ----------------------------------------
    def derived_partial(self, atom, wrt) -> Expr:
        key = (atom, wrt)
        hit = self._partial_cache.get(key)
        if hit is None:
            sym = self.derived[atom[1]]
            if wrt in sym.dependencies(atom[2], self):
                hit = sym.rule(atom[2], wrt, self)
            else:
                hit = Expr()
            self._partial_cache[key] = hit
        return hit

    def derived_dependencies(self, atom):
        return self.derived[atom[1]].dependencies(atom[2], self)


# partial derivatives --------------------------------------------------

def partial(e: Expr, c, ctx: JetContext) -> Expr:
    """Formal partial derivative treating every coordinate as independent."""
    if isinstance(c, Expr):
        (m, _), = c.terms.items()
        (c, _), = m
    ctx.check_atom(c)
    out = Expr()
    acc = {}
    for mono, coeff in e.terms.items():
        for idx, (a, k) in enumerate(mono):
            if a == c:
                rest = mono[:idx] + (((a, k - 1),) if k != 1 else ()) + mono[idx + 1:]
                v = acc.get(rest, 0) + coeff * k
                if v:
                    acc[rest] = v
                else:
                    del acc[rest]
            elif a[0] == "d":
                r = ctx.derived_partial(a, c)
                if r.terms:
                    rest = mono[:idx] + (((a, k - 1),) if k != 1 else ()) + mono[idx + 1:]
                    out = out + Expr({rest: coeff * k}) * r
    return out + Expr({m: _norm_coeff(v) for m, v in acc.items()})


# evaluation -----------------------------------------------------------

def _sqrt_abs(x):
    if hasattr(x, "sqrt_abs"):
        return x.sqrt_abs()
    if isinstance(x, (int, Fraction)):
        x = abs(Fraction(x))
        p, q = x.numerator, x.denominator
        rp, rq = isqrt(p), isqrt(q)
        if rp * rp == p and rq * rq == q:
            return Fraction(rp, rq)
        with mpmath.workdps(MP_DIGITS):
            return mpmath.sqrt(mpmath.mpf(p) / q)
    return abs(x) ** 0.5 if not isinstance(x, mpmath.mpf) else mpmath.sqrt(abs(x))


def _is_unit(x) -> bool:
    f = getattr(x, "is_unit", None)
    return f() if f is not None else x != 0


def gauss_inverse(mat):
    """Inverse and determinant of a square matrix over any exact field-like ring."""
    n = len(mat)
    a = [list(row) + [1 if i == j else 0 for j in range(n)] for i, row in enumerate(mat)]
    det = 1
    for col in range(n):
        piv = next((r for r in range(col, n) if _is_unit(a[r][col])), None)
        if piv is None:
            raise SingularDerived("matrix is singular at this point")
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        p = a[col][col]
        det = det * p
        inv_p = 1 / p if not hasattr(p, "inverse") else p.inverse()
        a[col] = [v * inv_p for v in a[col]]
        for r in range(n):
            if r != col:
                f = a[r][col]
                if isinstance(f, (int, Fraction)) and f == 0:
                    continue
                a[r] = [v - f * w for v, w in zip(a[r], a[col])]
    return [row[n:] for row in a], det


def evaluate(e: Expr, lookup: Callable, ctx: JetContext, memo=None):
    """Evaluate over any ring whose elements mix with Fractions.

    ``lookup(atom)`` returns the value of a base/jet/constant atom; derived
    symbols are resolved through their registered evaluators.
    """
    memo = {} if memo is None else memo
    cache = {}

    def val(a):
        v = cache.get(a)
        if v is None:
            if a[0] == "d":
                v = ctx.derived[a[1]].value(a[2], lookup, memo)
            else:
                v = lookup(a)
            cache[a] = v
        return v

    total = None
    for mono, c in e.terms.items():
        term = Fraction(c)
        for a, k in mono:
            v = val(a)
            term = term * (v ** k if k != 1 else v)
        total = term if total is None else total + term
    return Fraction(0) if total is None else total


def eval_numeric(e: Expr, point: dict, ctx: JetContext):
    """Value of ``e`` at a point given as ``{atom or single-atom Expr: rational}``.

    Exact Fraction when all derived symbols are rational at the point;
    otherwise an ``mpmath.mpf`` carrying MP_DIGITS significant digits.
    """
    pt = {}
    for k, v in point.items():
        if isinstance(k, Expr):
            (m, _), = k.terms.items()
            (k, _), = m
        pt[k] = Fraction(v)

    def lookup(a):
        try:
            return pt[a]
        except KeyError:
            raise UnboundCoordinate(f"no value bound for {render_atom(a)}") from None

    with mpmath.workdps(MP_DIGITS):
        try:
            return evaluate(e, lookup, ctx)
        except ZeroDivisionError as exc:
            raise SingularDerived(str(exc)) from None


# substitution ---------------------------------------------------------

def substitute(e: Expr, bindings: dict, ctx: JetContext | None = None) -> Expr:
    """Simultaneous substitution of atoms by expressions."""
    b = {}
    for k, v in bindings.items():
        if isinstance(k, Expr):
            (m, _), = k.terms.items()
            (k, _), = m
        v = Expr.lift(v)
        if ctx is not None:
            for a in v.atoms():
                ctx.check_atom(a)
        b[k] = v
    if not b:
        return e
    out = Expr()
    for mono, c in e.terms.items():
        if not any(a in b for a, _ in mono):
            out = out + Expr({mono: c})
            continue
        term = Expr.const(c)
        keep = []
        for a, k in mono:
            if a in b:
                term = term * (b[a] ** k)
            else:
                keep.append((a, k))
        out = out + term * Expr({tuple(keep): 1})
    return out


# metric support -------------------------------------------------------

def metric_symbols(field_name: str = "g", n: int = 4):
    """``sqrtg`` and ``glow[a,b]`` for an inverse-metric field ``g[a,b]``.

    ``g[a,b]`` holds the contravariant metric; ``glow`` is its matrix
    inverse and ``sqrtg = sqrt|det glow| = 1/sqrt|det g|``.  Partials are
    taken with respect to the independent stored components (a <= b), so
    off-diagonal derivatives pick up both matrix entries.
    """
    zero = MultiIndex.zero(n)

    def deps(args, ctx):
        return {jet_atom(field_name, c, zero) for c in ctx.fields[field_name].components}

    def glow(a, b):
        return Expr.atom(derived_atom("glow", tuple(sorted((a, b)))))

    def glow_rule(args, wrt, ctx):
        a, b = args
        r, s = wrt[2]
        if r == s:
            return -(glow(a, r) * glow(r, b))
        return -(glow(a, r) * glow(s, b) + glow(a, s) * glow(r, b))

    def sqrtg_rule(args, wrt, ctx):
        r, s = wrt[2]
        sg = Expr.atom(derived_atom("sqrtg"))
        return sg * glow(r, s) * (Fraction(-1, 2) if r == s else -1)

    def metric_matrix(lookup):
        return [[lookup(jet_atom(field_name, tuple(sorted((a, b))), zero))
                 for b in range(1, n + 1)] for a in range(1, n + 1)]

    def inverse(lookup, memo):
        key = ("metric-inverse", field_name)
        if key not in memo:
            memo[key] = gauss_inverse(metric_matrix(lookup))
        return memo[key]

    def glow_value(args, lookup, memo):
        inv, _ = inverse(lookup, memo)
        return inv[args[0] - 1][args[1] - 1]

    def sqrtg_value(args, lookup, memo):
        _, det = inverse(lookup, memo)
        r = _sqrt_abs(det)
        return r.inverse() if hasattr(r, "inverse") else 1 / r

    return [
        DerivedSymbol("sqrtg", 0, deps, sqrtg_rule, sqrtg_value, invertible=True),
        DerivedSymbol("glow", 2, deps, glow_rule, glow_value, symmetric_args=True, index_range=n),
    ]


def contract_metric(e: Expr, ctx: JetContext) -> Expr:
    """Rewrite ``sum_k glow[a,k] g[k,b] * rest`` into ``delta(a,b) * rest``.

    Applied only where all ``n`` summands are present, so the term count
    never grows; repeated until no group remains.
    """
    if ctx.metric is None:
        return e
    g = ctx.metric
    zero = MultiIndex.zero(ctx.n)
    n = ctx.n
    terms = dict(e.terms)

    def gl(a, k):
        return derived_atom("glow", tuple(sorted((a, k))))

    def gf(k, b):
        return jet_atom(g, tuple(sorted((k, b))), zero)

    def strip(mono, atoms):
        d = dict(mono)
        for a in atoms:
            d[a] -= 1
            if not d[a]:
                del d[a]
        return tuple(sorted(d.items()))

    changed = True
    while changed:
        changed = False
        for mono in list(terms):
            if mono not in terms:
                continue
            lows = [a for a, _ in mono if a[0] == "d" and a[1] == "glow"]
            ups = [a for a, _ in mono if a[0] == "y" and a[1] == g and a[3] == zero]
            done = False
            for lo in lows:
                for up in ups:
                    for k in set(lo[2]) & set(up[2]):
                        a = lo[2][1] if lo[2][0] == k else lo[2][0]
                        b = up[2][1] if up[2][0] == k else up[2][0]
                        rest = strip(mono, (lo, up))
                        group = [_mono_mul(_mono_mul(rest, ((gl(a, j), 1),)), ((gf(j, b), 1),))
                                 for j in range(1, n + 1)]
                        if len(set(group)) != n or not all(m in terms for m in group):
                            continue
                        c = min((terms[m] for m in group), key=abs)
                        for m in group:
                            v = terms[m] - c
                            if v:
                                terms[m] = _norm_coeff(v)
                            else:
                                del terms[m]
                        if a == b:
                            v = terms.get(rest, 0) + c
                            if v:
                                terms[rest] = _norm_coeff(v)
                            else:
                                terms.pop(rest, None)
                        changed = done = True
                        break
                    if done:
                        break
                if done:
                    break
    return Expr(terms)


# random probing -------------------------------------------------------

def random_rational(rng: random.Random, lo=-3, hi=3, den=5) -> Fraction:
    return Fraction(rng.randint(lo * den, hi * den), rng.randint(1, den))


def random_metric(n: int, rng: random.Random, scale=Fraction(1, 10)):
    """Random contravariant metric near Minkowski with rational sqrt|det|.

    Built as ``L eta L^T`` with ``L`` = diagonal times unit-triangular, so
    ``|det|`` is the square of a rational.
    """
    eta = [1] + [-1] * (n - 1)
    d = [1 + scale * Fraction(rng.randint(-5, 5), 5) for _ in range(n)]
    L = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        L[i][i] = d[i]
        for j in range(i):
            L[i][j] = d[i] * scale * Fraction(rng.randint(-5, 5), 5)
    return [[sum(L[i][k] * eta[k] * L[j][k] for k in range(n)) for j in range(n)]
            for i in range(n)]


def random_point(atoms, ctx: JetContext, rng: random.Random) -> dict:
    point = {}
    if ctx.metric is not None:
        gm = random_metric(ctx.n, rng)
        zero = MultiIndex.zero(ctx.n)
        for c in ctx.fields[ctx.metric].components:
            point[jet_atom(ctx.metric, c, zero)] = gm[c[0] - 1][c[1] - 1]
    for a in sorted(atoms):
        if a[0] == "d":
            for dep in ctx.derived_dependencies(a):
                if dep not in point:
                    point[dep] = random_rational(rng)
            continue
        if a not in point:
            point[a] = random_rational(rng, -1, 1) if a[0] == "y" and ctx.metric == a[1] \
                else random_rational(rng)
    return point


def probe_zero(e: Expr, ctx: JetContext, points: int = 20, seed: int = 0) -> bool:
    """Randomized exact-arithmetic zero test (sound falsification)."""
    if e.is_zero():
        return True
    rng = random.Random(seed)
    atoms = e.atoms()
    for _ in range(points):
        if eval_numeric(e, random_point(atoms, ctx, rng), ctx) != 0:
            return False
    return True


def equivalent(a: Expr, b: Expr, ctx: JetContext, points: int = 20, seed: int = 0) -> bool:
    """Canonical equality, falling back to a randomized numeric probe."""
    if a == b:
        return True
    return probe_zero(a - b, ctx, points, seed)


# rendering ------------------------------------------------------------

def _fmt_q(q) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def render_atom(a) -> str:
    kind = a[0]
    if kind == "x":
        return f"x[{a[1]}]"
    if kind == "c":
        return a[1]
    if kind == "d":
        return a[1] + (f"[{','.join(map(str, a[2]))}]" if a[2] else "")
    comp = ",".join(map(str, a[2]))
    if a[3].order == 0:
        return f"{a[1]}[{comp}]"
    return f"{a[1]}[{comp}; {a[3].render()}]"


def mono_key(mono):
    return (sum(abs(k) for _, k in mono), mono)


def render_mono(mono) -> str:
    parts = []
    for a, k in mono:
        s = render_atom(a)
        parts.append(s if k == 1 else f"{s}^{k}" if k > 0 else f"{s}^({k})")
    return "*".join(parts)


def render_text(e: Expr) -> str:
    if not e.terms:
        return "0"
    out = []
    for mono in sorted(e.terms, key=mono_key):
        c = Fraction(e.terms[mono])
        neg = c < 0
        c = abs(c)
        body = render_mono(mono)
        if not body:
            s = _fmt_q(c)
        elif c == 1:
            s = body
        else:
            s = f"{_fmt_q(c)}*{body}"
        if not out:
            out.append(f"-{s}" if neg else s)
        else:
            out.append(f"- {s}" if neg else f"+ {s}")
    return " ".join(out)
