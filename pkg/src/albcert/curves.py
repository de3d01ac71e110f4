"""Exact arithmetic on elliptic curves over Q.

Curves live in long Weierstrass form

    y^2 + a1*x*y + a3*y = x^3 + a2*x^2 + a4*x + a6

with Fraction coefficients, so database models such as y^2 + y = x^3 - x
load losslessly.  The Legendre form y^2 = x(x - alpha)(x - beta) is a
derived view with a recorded substitution (available exactly when the
2-torsion is fully rational).  Every operation is exact; there is no
floating point in this module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import NotFullTwoTorsion, SingularCurve
from .polys import rational_roots

Rat = Fraction

MAZUR_ORDER_BOUND = 12  # largest torsion order of a point on E(Q)


@dataclass(frozen=True)
class ECPoint:
    """A point on a Weierstrass model: affine (x, y) or the point at infinity."""

    x: Rat | None = None
    y: Rat | None = None

    @property
    def is_infinity(self) -> bool:
        return self.x is None

    def __repr__(self):
        if self.is_infinity:
            return "O"
        return f"({self.x}, {self.y})"


INFINITY = ECPoint()


def _rat(v) -> Rat:
    return v if isinstance(v, Fraction) else Fraction(v)


@dataclass(frozen=True)
class EllipticCurve:
    a1: Rat
    a2: Rat
    a3: Rat
    a4: Rat
    a6: Rat

    def __post_init__(self):
        for name in ("a1", "a2", "a3", "a4", "a6"):
            object.__setattr__(self, name, _rat(getattr(self, name)))
        if self.discriminant() == 0:
            raise SingularCurve(f"singular model {self.a_invariants()}")

    @classmethod
    def from_a_invariants(cls, a) -> "EllipticCurve":
        a1, a2, a3, a4, a6 = (Fraction(v) for v in a)
        return cls(a1, a2, a3, a4, a6)

    def a_invariants(self) -> tuple[Rat, Rat, Rat, Rat, Rat]:
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    # standard b/c invariants
    @property
    def b2(self) -> Rat:
        return self.a1 * self.a1 + 4 * self.a2

    @property
    def b4(self) -> Rat:
        return 2 * self.a4 + self.a1 * self.a3

    @property
    def b6(self) -> Rat:
        return self.a3 * self.a3 + 4 * self.a6

    @property
    def b8(self) -> Rat:
        return (
            self.a1 * self.a1 * self.a6
            + 4 * self.a2 * self.a6
            - self.a1 * self.a3 * self.a4
            + self.a2 * self.a3 * self.a3
            - self.a4 * self.a4
        )

    def discriminant(self) -> Rat:
        b2, b4, b6, b8 = self.b2, self.b4, self.b6, self.b8
        return -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6

    def contains(self, P: ECPoint) -> bool:
        if P.is_infinity:
            return True
        x, y = P.x, P.y
        lhs = y * y + self.a1 * x * y + self.a3 * y
        rhs = x**3 + self.a2 * x * x + self.a4 * x + self.a6
        return lhs == rhs

    def __repr__(self):
        return f"EllipticCurve{self.a_invariants()}"


def negate(E: EllipticCurve, P: ECPoint) -> ECPoint:
    if P.is_infinity:
        return INFINITY
    return ECPoint(P.x, -P.y - E.a1 * P.x - E.a3)


def add(E: EllipticCurve, P: ECPoint, Q: ECPoint) -> ECPoint:
    """Chord-tangent sum P + Q, exactly."""
    if P.is_infinity:
        return Q
    if Q.is_infinity:
        return P
    x1, y1, x2, y2 = P.x, P.y, Q.x, Q.y
    a1, a2, a3, a4, a6 = E.a_invariants()
    if x1 == x2:
        if y1 + y2 + a1 * x2 + a3 == 0:
            return INFINITY
        lam = (3 * x1 * x1 + 2 * a2 * x1 + a4 - a1 * y1) / (2 * y1 + a1 * x1 + a3)
        nu = (-(x1**3) + a4 * x1 + 2 * a6 - a3 * y1) / (2 * y1 + a1 * x1 + a3)
    else:
        lam = (y2 - y1) / (x2 - x1)
        nu = (y1 * x2 - y2 * x1) / (x2 - x1)
    x3 = lam * lam + a1 * lam - a2 - x1 - x2
    y3 = -(lam + a1) * x3 - nu - a3
    return ECPoint(x3, y3)


def sub(E: EllipticCurve, P: ECPoint, Q: ECPoint) -> ECPoint:
    return add(E, P, negate(E, Q))


def scalar_mul(E: EllipticCurve, n: int, P: ECPoint) -> ECPoint:
    """n*P by double-and-add; n may be negative or zero."""
    if n < 0:
        return scalar_mul(E, -n, negate(E, P))
    acc = INFINITY
    base = P
    while n:
        if n & 1:
            acc = add(E, acc, base)
        n >>= 1
        if n:
            base = add(E, base, base)
    return acc


def two_division_poly(E: EllipticCurve) -> list[Rat]:
    """4x^3 + b2 x^2 + 2 b4 x + b6, whose roots are the 2-torsion x-values."""
    return [E.b6, 2 * E.b4, E.b2, Fraction(4)]


def two_torsion(E: EllipticCurve) -> set[ECPoint]:
    """All rational points killed by 2, including the identity."""
    pts = {INFINITY}
    for r in rational_roots(two_division_poly(E)):
        y = -(E.a1 * r + E.a3) / 2
        pts.add(ECPoint(r, y))
    return pts


def _torsion_scale(E: EllipticCurve) -> int:
    """u with (x, y) -> (u^2 x, u^3 y) landing on an integral model."""
    u = 1
    for a in E.a_invariants():
        u = math.lcm(u, a.denominator)
    return u


def is_torsion(E: EllipticCurve, P: ECPoint) -> tuple[bool, int | None]:
    """Exact torsion test over Q.

    Checks n*P = O for n up to 12; by Mazur's classification of rational
    torsion this is exhaustive, so a miss proves infinite order.  Two exact
    pre-filters skip the multiple chain for points that cannot be torsion:
    on an integral model a torsion point has v_p(x) >= 0 at odd p and
    v_2(x) >= -2 (the formal group admits 2-torsion only at level one), and
    its numerator is bounded through the division-polynomial root bounds,
    so wildly large coordinates are rejected outright.
    """
    if P.is_infinity:
        return True, 1
    u = _torsion_scale(E)
    x_int = 4 * u * u * P.x
    if x_int.denominator != 1:
        return False, None
    coeff_bits = max(
        max(a.numerator.bit_length(), a.denominator.bit_length())
        for a in E.a_invariants()
    )
    if x_int.numerator.bit_length() > 4096 * (coeff_bits + 16):
        return False, None
    acc = P
    for n in range(2, MAZUR_ORDER_BOUND + 1):
        acc = add(E, acc, P)
        if acc.is_infinity:
            return True, n
    return False, None


@dataclass(frozen=True)
class LegendrePair:
    """Substitution data putting a curve in the form y^2 = x(x-alpha)(x-beta).

    The isomorphism from the source model (x, y) is

        eta    = y + (a1*x + a3)/2
        x_leg  = (x - shift) / scale^2
        y_leg  = eta / scale^3

    so (shift, scale) together with the source a1, a3 determine it fully.
    """

    alpha: Rat
    beta: Rat
    shift: Rat
    scale: Rat = Fraction(1)

    def __post_init__(self):
        if self.alpha == 0 or self.beta == 0 or self.alpha == self.beta:
            raise ValueError("need alpha, beta nonzero and distinct")

    def curve(self) -> EllipticCurve:
        """The target model y^2 = x(x - alpha)(x - beta)."""
        a, b = self.alpha, self.beta
        return EllipticCurve(0, -(a + b), 0, a * b, 0)

    def push(self, E: EllipticCurve, P: ECPoint) -> ECPoint:
        """Map a point of the source curve E onto the Legendre model."""
        if P.is_infinity:
            return INFINITY
        eta = P.y + (E.a1 * P.x + E.a3) / 2
        u2 = self.scale * self.scale
        return ECPoint((P.x - self.shift) / u2, eta / (u2 * self.scale))

    def pull(self, E: EllipticCurve, P: ECPoint) -> ECPoint:
        """Map a point of the Legendre model back onto the source curve E."""
        if P.is_infinity:
            return INFINITY
        u2 = self.scale * self.scale
        x = u2 * P.x + self.shift
        eta = u2 * self.scale * P.y
        return ECPoint(x, eta - (E.a1 * x + E.a3) / 2)


def to_legendre(E: EllipticCurve, all_orderings: bool = False):
    """Legendre normal form(s) of a curve with fully rational 2-torsion.

    The canonical ordering translates the smallest 2-torsion x-value to the
    origin and keeps the remaining roots in increasing order.  With
    ``all_orderings`` every choice of which root goes to the origin and how
    the other two are ordered is returned (six pairs); these feed the six
    hyperelliptic variants of the pair construction.

    Raises NotFullTwoTorsion when fewer than four 2-torsion points exist.
    """
    roots = rational_roots(two_division_poly(E))
    if len(roots) != 3:
        raise NotFullTwoTorsion(
            f"curve {E.a_invariants()} has {len(roots)} rational 2-torsion x-values"
        )
    e0, e1, e2 = sorted(roots)
    orderings = []
    for base, r1, r2 in (
        (e0, e1, e2),
        (e0, e2, e1),
        (e1, e0, e2),
        (e1, e2, e0),
        (e2, e0, e1),
        (e2, e1, e0),
    ):
        orderings.append(LegendrePair(alpha=r1 - base, beta=r2 - base, shift=base))
    if all_orderings:
        return orderings
    return orderings[0]
