"""Truncated multivariate Taylor series over a prime field, with reverse-mode AD.

Used to probe identities along random polynomial sections: a series of
degree K in the base coordinates about x = 0 carries the K-jet of a
function along the section, total derivatives become plain partial
derivatives, and all arithmetic stays exact (modulo ``PRIME``).

Each series records ``deg``, the highest total degree whose coefficients
are trustworthy; differentiation lowers it by one and products take the
minimum, so running out of jet depth is detected instead of silently
producing wrong coefficients.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations_with_replacement
from math import isqrt

import numpy as np

from .errors import JetvarError

# Largest prime below 2**27: products of two residues fit in 54 bits, so
# sums of up to 2**9 products cannot overflow int64 before reduction.
PRIME = 134217689


class TruncationError(JetvarError):
    """A probe needed more Taylor degree than was allocated."""


def residue(q) -> int:
    q = Fraction(q)
    den = q.denominator % PRIME
    if den == 0:
        raise ZeroDivisionError("denominator divisible by the probe prime")
    return q.numerator % PRIME * pow(den, -1, PRIME) % PRIME


def rational_reconstruct(r: int, bound: int | None = None) -> Fraction:
    """Smallest-height rational congruent to ``r`` (Wang's algorithm)."""
    bound = bound or int((PRIME // 2) ** 0.5)
    r0, r1 = PRIME, r % PRIME
    s0, s1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound:
        raise ValueError("no small rational reconstruction")
    return Fraction(r1, s1)


class TaylorSpace:
    """Monomial basis of total degree <= ``degree`` in ``n`` variables."""

    def __init__(self, n: int, degree: int):
        self.n, self.degree = n, degree
        monos = self.monomials(n, degree)
        self.monos = monos
        self.index = {m: i for i, m in enumerate(monos)}
        self.size = len(monos)
        self.mono_deg = np.array([sum(m) for m in monos])
        pairs = []
        for i, a in enumerate(monos):
            for j, b in enumerate(monos):
                if self.mono_deg[i] + self.mono_deg[j] <= degree:
                    pairs.append((self.index[tuple(x + y for x, y in zip(a, b))], i, j))
        pairs.sort()
        tgt = np.array([p[0] for p in pairs])
        self._I = np.array([p[1] for p in pairs])
        self._J = np.array([p[2] for p in pairs])
        self._starts = np.flatnonzero(np.r_[True, tgt[1:] != tgt[:-1]])
        self._targets = tgt[self._starts]
        self._deriv = []
        for s in range(n):
            src, dst, fac = [], [], []
            for i, m in enumerate(monos):
                if m[s]:
                    lower = list(m)
                    lower[s] -= 1
                    src.append(i)
                    dst.append(self.index[tuple(lower)])
                    fac.append(m[s])
            self._deriv.append((np.array(src), np.array(dst), np.array(fac, dtype=np.int64)))
        self.sqrt_roots = {}

    @staticmethod
    def monomials(n: int, degree: int) -> list:
        """Exponent tuples graded by total degree (lower degrees form a prefix)."""
        monos = []
        for d in range(degree + 1):
            for combo in combinations_with_replacement(range(n), d):
                e = [0] * n
                for v in combo:
                    e[v] += 1
                monos.append(tuple(e))
        return monos

    def register_root(self, value) -> None:
        """Declare the exact square root of ``|value|`` for sqrt_abs lookups."""
        q = Fraction(value)
        a = abs(q)
        num, den = a.numerator, a.denominator
        rn, rd = isqrt(num), isqrt(den)
        if rn * rn != num or rd * rd != den:
            raise JetvarError(f"{value} is not a rational square up to sign")
        self.sqrt_roots[residue(q)] = (residue(Fraction(rn, rd)), 1 if q > 0 else -1)

    def mask(self, deg: int):
        return self.mono_deg <= deg

    def const(self, q) -> "Taylor":
        c = np.zeros(self.size, dtype=np.int64)
        c[0] = residue(q)
        return Taylor(self, c, self.degree)

    def coordinate(self, sigma: int) -> "Taylor":
        c = np.zeros(self.size, dtype=np.int64)
        if self.degree >= 1:
            e = [0] * self.n
            e[sigma - 1] = 1
            c[self.index[tuple(e)]] = 1
        return Taylor(self, c, self.degree)

    def from_coeffs(self, coeffs: dict, deg=None) -> "Taylor":
        c = np.zeros(self.size, dtype=np.int64)
        for m, q in coeffs.items():
            if sum(m) <= self.degree:
                c[self.index[m]] = residue(q)
        return Taylor(self, c, self.degree if deg is None else deg)

    def mul(self, a, b):
        prod = (a[self._I] * b[self._J]) % PRIME
        out = np.zeros(self.size, dtype=np.int64)
        out[self._targets] = np.add.reduceat(prod, self._starts) % PRIME
        return out


class Taylor:
    """Element of the truncated series ring over GF(PRIME)."""

    __slots__ = ("space", "c", "deg")

    def __init__(self, space: TaylorSpace, c, deg: int):
        self.space, self.deg = space, deg
        if deg < space.degree:
            c = np.where(space.mask(deg), c, 0)
        self.c = c

    def _coerce(self, other):
        if isinstance(other, Taylor):
            return other
        if isinstance(other, (int, Fraction)):
            return self.space.const(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Taylor(self.space, (self.c + o.c) % PRIME, min(self.deg, o.deg))

    __radd__ = __add__

    def __neg__(self):
        return Taylor(self.space, (-self.c) % PRIME, self.deg)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Taylor(self.space, (self.c - o.c) % PRIME, min(self.deg, o.deg))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Taylor(self.space, self.c * residue(other) % PRIME, self.deg)
        if not isinstance(other, Taylor):
            return NotImplemented
        return Taylor(self.space, self.space.mul(self.c, other.c), min(self.deg, other.deg))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = self.space.const(1)
        for _ in range(k):
            out = out * self
        return out

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def derivative(self, sigma: int) -> "Taylor":
        src, dst, fac = self.space._deriv[sigma - 1]
        out = np.zeros(self.space.size, dtype=np.int64)
        out[dst] = self.c[src] * fac % PRIME
        return Taylor(self.space, out, self.deg - 1)

    def constant(self) -> int:
        if self.deg < 0:
            raise TruncationError("no valid coefficients left; raise the probe degree")
        return int(self.c[0])

    def is_unit(self) -> bool:
        return self.deg >= 0 and self.c[0] != 0

    def is_zero(self) -> bool:
        if self.deg < 0:
            raise TruncationError("no valid coefficients left; raise the probe degree")
        return not self.c.any()

    def _series(self, coeffs):
        """sum_k coeffs[k] u^k with u = self/c0 - 1 (u has no constant term)."""
        c0 = int(self.c[0])
        u = self * pow(c0, -1, PRIME) - 1
        out = self.space.const(0) + coeffs[0]
        power = None
        for k in range(1, self.space.degree + 1):
            power = u if power is None else power * u
            out = out + power * coeffs[k]
        return Taylor(self.space, out.c, self.deg)

    def inverse(self) -> "Taylor":
        if not self.is_unit():
            raise ZeroDivisionError("series with vanishing constant term is not invertible")
        inv0 = pow(int(self.c[0]), -1, PRIME)
        geo = self._series([(-1) ** k for k in range(self.space.degree + 1)])
        return geo * inv0

    def abs_sign(self) -> int:
        try:
            return self.space.sqrt_roots[int(self.c[0])][1]
        except KeyError:
            raise JetvarError("sqrt_abs of a series whose constant term was not registered") from None

    def sqrt_abs(self) -> "Taylor":
        """sqrt(|f|) near 0, using the registered exact root of |f(0)|."""
        try:
            root, _ = self.space.sqrt_roots[int(self.c[0])]
        except KeyError:
            raise JetvarError("sqrt_abs of a series whose constant term was not registered") from None
        coeffs, b = [], Fraction(1)
        for k in range(self.space.degree + 1):
            coeffs.append(b)
            b = b * (Fraction(1, 2) - k) / (k + 1)
        return self._series(coeffs) * root


class TaylorCalculus:
    """Coefficient ring interface (D, is_zero, scale) for generic algorithms."""

    def __init__(self, space: TaylorSpace):
        self.space = space
        self.n = space.n

    def D(self, t, sigma):
        return t.derivative(sigma)

    @staticmethod
    def is_zero(t) -> bool:
        return t.is_zero()

    @staticmethod
    def scale(t, q):
        return t * q

    def zero(self):
        return self.space.const(0)


# reverse-mode automatic differentiation ------------------------------------

class Tape:
    def __init__(self):
        self.nodes = []

    def leaf(self, value: Taylor) -> "Node":
        return Node(self, value, ())

    def gradient(self, out: "Node", leaves) -> list:
        """d out / d leaf for each leaf, as series (``None`` when independent)."""
        adj = {out.idx: out.value.space.const(1)}
        for node in reversed(self.nodes[:out.idx + 1]):
            a = adj.pop(node.idx, None)
            if a is None:
                continue
            if not node.parents:
                adj[node.idx] = a
                continue
            for parent, factor in node.parents:
                contrib = a * factor
                prev = adj.get(parent.idx)
                adj[parent.idx] = contrib if prev is None else prev + contrib
        grads = [adj.get(leaf.idx) for leaf in leaves]
        return grads


class Node:
    """Tape-recorded series value; arithmetic mirrors ``Taylor``."""

    __slots__ = ("tape", "value", "parents", "idx")

    def __init__(self, tape: Tape, value: Taylor, parents):
        self.tape, self.value, self.parents = tape, value, parents
        self.idx = len(tape.nodes)
        tape.nodes.append(self)

    def _new(self, value, parents):
        return Node(self.tape, value, parents)

    def __add__(self, other):
        if isinstance(other, Node):
            return self._new(self.value + other.value, ((self, 1), (other, 1)))
        if isinstance(other, (int, Fraction)):
            return self if other == 0 else self._new(self.value + other, ((self, 1),))
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return self._new(-self.value, ((self, -1),))

    def __sub__(self, other):
        if isinstance(other, Node):
            return self._new(self.value - other.value, ((self, 1), (other, -1)))
        if isinstance(other, (int, Fraction)):
            return self if other == 0 else self._new(self.value - other, ((self, 1),))
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Node):
            return self._new(self.value * other.value, ((self, other.value), (other, self.value)))
        if isinstance(other, (int, Fraction)):
            if other == 1:
                return self
            return self._new(self.value * other, ((self, other),))
        return NotImplemented

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = None
        for _ in range(k):
            out = self if out is None else out * self
        return 1 if out is None else out

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def inverse(self) -> "Node":
        v = self.value.inverse()
        return self._new(v, ((self, -(v * v)),))

    def sqrt_abs(self) -> "Node":
        r = self.value.sqrt_abs()
        factor = (r * 2).inverse() * self.value.abs_sign()
        return self._new(r, ((self, factor),))

    def is_unit(self) -> bool:
        return self.value.is_unit()
