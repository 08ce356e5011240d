import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from jetvar.errors import JetvarError
from jetvar.taylor import PRIME, Tape, TaylorSpace, TruncationError, rational_reconstruct, residue

seeds = st.integers(0, 10**6)


def _poly(rng, n, deg, c0=None):
    coeffs = {m: Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for m in TaylorSpace.monomials(n, deg)}
    if c0 is not None:
        coeffs[(0,) * n] = c0
    return coeffs


def _mul_exact(a, b, deg):
    out = {}
    for ma, qa in a.items():
        for mb, qb in b.items():
            m = tuple(x + y for x, y in zip(ma, mb))
            if sum(m) <= deg:
                out[m] = out.get(m, 0) + qa * qb
    return out


@given(st.fractions(max_denominator=1000).filter(lambda q: abs(q.numerator) < 1000))
def test_rational_reconstruction_inverts_residue(q):
    assert rational_reconstruct(residue(q)) == q


@given(seeds)
def test_product_matches_exact_polynomial_product(seed):
    rng = random.Random(seed)
    n, deg = rng.randint(1, 3), rng.randint(1, 4)
    sp = TaylorSpace(n, deg)
    a, b = _poly(rng, n, deg), _poly(rng, n, deg)
    got = sp.from_coeffs(a) * sp.from_coeffs(b)
    assert (got - sp.from_coeffs(_mul_exact(a, b, deg))).is_zero()


@given(seeds)
def test_inverse_and_square_root(seed):
    rng = random.Random(seed)
    n, deg = rng.randint(1, 3), rng.randint(1, 4)
    sp = TaylorSpace(n, deg)
    c0 = Fraction(rng.choice([-1, 1]) * rng.randint(1, 6) ** 2, rng.randint(1, 4) ** 2)
    f = sp.from_coeffs(_poly(rng, n, deg, c0))
    assert (f * f.inverse() - 1).is_zero()
    sp.register_root(c0)
    r = f.sqrt_abs()
    assert (r * r - f * (1 if c0 > 0 else -1)).is_zero()


def test_derivative_lowers_precision():
    sp = TaylorSpace(2, 2)
    x = sp.coordinate(1)
    f = x * x * x  # truncated away entirely at degree 2
    assert f.is_zero()
    d = x.derivative(1).derivative(1).derivative(1)
    with pytest.raises(TruncationError):
        d.is_zero()


def test_register_root_requires_rational_square():
    sp = TaylorSpace(1, 2)
    with pytest.raises(JetvarError):
        sp.register_root(2)


def test_prime_is_prime_and_fits():
    assert PRIME < 2 ** 27
    assert all(PRIME % p for p in range(2, int(PRIME ** 0.5) + 1))


@given(seeds)
def test_reverse_mode_gradient(seed):
    """d/dx (x y + x^3 / y) = y + 3 x^2 / y and d/dy = x - x^3 / y^2."""
    rng = random.Random(seed)
    sp = TaylorSpace(2, 3)
    xs = sp.from_coeffs(_poly(rng, 2, 3, Fraction(rng.randint(1, 9))))
    ys = sp.from_coeffs(_poly(rng, 2, 3, Fraction(rng.randint(1, 9))))
    tape = Tape()
    x, y = tape.leaf(xs), tape.leaf(ys)
    out = x * y + x ** 3 / y
    gx, gy = tape.gradient(out, [x, y])
    assert (gx - (ys + xs * xs * 3 * ys.inverse())).is_zero()
    assert (gy - (xs - xs ** 3 * ys.inverse() ** 2)).is_zero()
