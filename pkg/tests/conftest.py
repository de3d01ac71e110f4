import random
from fractions import Fraction

import pytest

from albcert.curves import ECPoint, EllipticCurve
from albcert.polys import pmul


@pytest.fixture
def curve_37a1():
    """y^2 + y = x^3 - x, the classic rank-1 curve without 2-torsion."""
    return EllipticCurve(0, 0, 1, -1, 0)


@pytest.fixture
def gen_37a1():
    return ECPoint(Fraction(0), Fraction(0))


def _from_roots(r1, r2, r3):
    f = pmul(pmul([Fraction(-r1), Fraction(1)], [Fraction(-r2), Fraction(1)]),
             [Fraction(-r3), Fraction(1)])
    return EllipticCurve(0, f[2], 0, f[1], f[0])


@pytest.fixture
def draft_pair():
    """The worked rank-1 pair with conductors 205 and 117 and its known
    glued-curve point; used as a regression fixture throughout."""
    E1 = _from_roots(171, 27, -198)
    E2 = _from_roots(171, 90, -261)
    P1 = ECPoint(Fraction(-1629, 25), Fraction(-212544, 125))
    P2 = ECPoint(Fraction(9, 4), Fraction(-15795, 8))
    assert E1.contains(P1) and E2.contains(P2)
    return E1, E2, P1, P2


@pytest.fixture
def rng():
    return random.Random(0xA1B2C3)


def random_point_curve(rng, coeff_bound=60):
    """A random full-2-torsion curve with a constructed rational point."""
    while True:
        x0 = rng.randint(-9, 9)
        alpha = rng.randint(-9, 9)
        y0 = rng.randint(1, 15)
        if x0 == 0 or alpha == 0 or x0 == alpha:
            continue
        beta = Fraction(x0) - Fraction(y0 * y0, x0 * (x0 - alpha))
        if beta in (0, alpha):
            continue
        k = beta.denominator
        a, b = Fraction(alpha) * k * k, beta * k * k
        if b.denominator != 1 or max(abs(a), abs(b)) > coeff_bound or a == b:
            continue
        try:
            E = EllipticCurve(0, -(a + b), 0, a * b, 0)
        except Exception:
            continue
        return E, ECPoint(Fraction(x0) * k * k, Fraction(y0) * k**3)
