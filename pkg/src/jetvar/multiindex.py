"""Symmetric derivative multi-indices over the base coordinates."""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations_with_replacement
from math import comb, factorial, prod

MAX_DIMENSION = 8


class MultiIndex(tuple):
    """Immutable tally of derivative counts, one slot per base coordinate.

    Slot ``k`` (0-based) holds the exponent of ``x(k+1)``.  Ordering is
    graded-lex: lower order first, then larger leading exponents first.
    """

    __slots__ = ()

    def __new__(cls, counts):
        counts = tuple(int(c) for c in counts)
        if any(c < 0 for c in counts):
            raise ValueError(f"negative multi-index entry in {counts}")
        if not 1 <= len(counts) <= MAX_DIMENSION:
            raise ValueError(f"dimension {len(counts)} outside 1..{MAX_DIMENSION}")
        return super().__new__(cls, counts)

    @classmethod
    def zero(cls, n: int) -> "MultiIndex":
        return cls((0,) * n)

    @classmethod
    def unit(cls, n: int, sigma: int) -> "MultiIndex":
        """Multi-index of the single base label ``sigma`` (1-based)."""
        if not 1 <= sigma <= n:
            raise ValueError(f"base label {sigma} outside 1..{n}")
        return cls(tuple(1 if k == sigma - 1 else 0 for k in range(n)))

    @classmethod
    def from_labels(cls, n: int, labels) -> "MultiIndex":
        counts = [0] * n
        for sigma in labels:
            if not 1 <= sigma <= n:
                raise ValueError(f"base label {sigma} outside 1..{n}")
            counts[sigma - 1] += 1
        return cls(counts)

    @property
    def dimension(self) -> int:
        return len(self)

    @property
    def order(self) -> int:
        return sum(self)

    @property
    def factorial(self) -> int:
        return prod(factorial(c) for c in self)

    def labels(self) -> tuple[int, ...]:
        """Expand into a sorted tuple of 1-based base labels."""
        out = []
        for k, c in enumerate(self):
            out.extend([k + 1] * c)
        return tuple(out)

    def _check(self, other):
        if len(self) != len(other):
            raise ValueError(f"dimension mismatch: {len(self)} vs {len(other)}")

    def __add__(self, other):
        self._check(other)
        return MultiIndex(a + b for a, b in zip(self, other))

    def __sub__(self, other):
        self._check(other)
        return MultiIndex(a - b for a, b in zip(self, other))

    def contains(self, other) -> bool:
        """True when ``other <= self`` componentwise."""
        self._check(other)
        return all(a >= b for a, b in zip(self, other))

    def sort_key(self):
        return (self.order, tuple(-c for c in self))

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def __le__(self, other):
        return self.sort_key() <= other.sort_key()

    def __gt__(self, other):
        return self.sort_key() > other.sort_key()

    def __ge__(self, other):
        return self.sort_key() >= other.sort_key()

    def __repr__(self):
        return f"MultiIndex({tuple(self)})"

    def render(self) -> str:
        """``x1^2 x3`` style text; the empty index renders as ``1``."""
        parts = []
        for k, c in enumerate(self):
            if c == 1:
                parts.append(f"x{k + 1}")
            elif c > 1:
                parts.append(f"x{k + 1}^{c}")
        return " ".join(parts) if parts else "1"


def add(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    return a + b


def multinomial(m: MultiIndex, a: MultiIndex) -> Fraction:
    """(m+a)! / (m! a!) as an exact rational."""
    m._check(a)
    return Fraction(prod(comb(x + y, x) for x, y in zip(m, a)))


def enumerate_indices(n: int, s: int) -> list[MultiIndex]:
    """All multi-indices of order <= s in graded-lex order."""
    if n < 1 or s < 0:
        raise ValueError("need n >= 1 and s >= 0")
    out = []
    for k in range(s + 1):
        level = [MultiIndex.from_labels(n, labels)
                 for labels in combinations_with_replacement(range(1, n + 1), k)]
        out.extend(sorted(level))
    return out


def of_order(n: int, k: int) -> list[MultiIndex]:
    return sorted(MultiIndex.from_labels(n, labels)
                  for labels in combinations_with_replacement(range(1, n + 1), k))


def splits(alpha: MultiIndex):
    """Yield ``(beta, sigma, weight)`` with beta + unit(sigma) = alpha.

    ``weight = alpha_sigma / |alpha|``; the weights over all splits sum
    to one, which fixes the symmetric choice of momenta and potentials.
    """
    k = alpha.order
    n = len(alpha)
    for idx, c in enumerate(alpha):
        if c:
            yield alpha - MultiIndex.unit(n, idx + 1), idx + 1, Fraction(c, k)
