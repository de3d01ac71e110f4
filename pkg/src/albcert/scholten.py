"""Gluing two fully-2-torsion elliptic curves along a genus-2 curve.

For parameters (alpha, beta, gamma, delta) the hyperelliptic model is

    (alpha*delta - beta*gamma) * y^2 =
        ((alpha-beta)x^2 - (gamma-delta)) (alpha x^2 - gamma) (beta x^2 - delta)

and it carries degree-2 maps onto y^2 = x(x-alpha)(x-beta) and
y^2 = x(x-gamma)(x-delta).  The map coefficients are not hardcoded: they are
derived by an exact undetermined-coefficient solve (the ansatz is
u = A x^2 + B with v = C y for the first factor, and the x -> 1/x mirror
for the second), then checked symbolically against the curve equation.
Re-parametrizing the first curve by its six Legendre orderings yields up to
six pairwise distinct models, each with its own verified maps.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .curves import ECPoint, EllipticCurve, INFINITY, LegendrePair
from .errors import Degenerate, MapDerivationFailed
from .intarith import sqrt_fraction
from .polys import (
    is_squarefree,
    padd,
    pdeg,
    peval,
    pgcd,
    pmul,
    pnorm,
    pscale,
    pstr,
    psub,
    pzero,
)

Rat = Fraction


@dataclass(frozen=True)
class HyperCurve:
    """A hyperelliptic model lead * y^2 = F(x) with F squarefree of degree 5 or 6."""

    lead: Rat
    poly: tuple[Rat, ...]  # coefficients of F, lowest degree first

    def __post_init__(self):
        object.__setattr__(self, "lead", Fraction(self.lead))
        object.__setattr__(self, "poly", tuple(Fraction(c) for c in self.poly))
        if self.lead == 0:
            raise Degenerate("leading constant vanishes")
        f = pnorm(list(self.poly))
        if pdeg(f) not in (5, 6):
            raise Degenerate(f"degree {pdeg(f)} model is not genus 2")
        if not is_squarefree(f):
            raise Degenerate("right-hand side is not squarefree")

    @property
    def degree(self) -> int:
        return pdeg(pnorm(list(self.poly)))

    def f(self) -> list[Rat]:
        return pnorm(list(self.poly))

    def rhs_over_lead(self) -> list[Rat]:
        return pscale(self.f(), 1 / self.lead)

    def contains(self, x: Rat, y: Rat) -> bool:
        return self.lead * y * y == peval(self.f(), Fraction(x))

    def infinite_branch_slope(self) -> Rat | None:
        """For a degree-6 model, s with y ~ s*x^3 at infinity when rational."""
        f = self.f()
        if pdeg(f) != 6:
            return None
        return sqrt_fraction(f[6] / self.lead)

    def __repr__(self):
        return f"HyperCurve({self.lead} * y^2 = {pstr(self.f())})"


# ---------------------------------------------------------------------------
# rational functions in one variable, just enough for map verification


class RF:
    """A rational function num/den over Q, reduced lazily."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        if den is None:
            den = [Fraction(1)]
        num, den = pnorm(list(num)), pnorm(list(den))
        if pzero(den):
            raise ZeroDivisionError("zero denominator")
        g = pgcd(num, den)
        if pdeg(g) > 0:
            from .polys import pdivmod

            num = pdivmod(num, g)[0]
            den = pdivmod(den, g)[0]
        # normalize so den is monic
        c = den[-1]
        self.num = pscale(num, 1 / c)
        self.den = pscale(den, 1 / c)

    @classmethod
    def const(cls, c) -> "RF":
        return cls([Fraction(c)])

    @classmethod
    def x_power(cls, k: int) -> "RF":
        if k >= 0:
            return cls([0] * k + [1])
        return cls([1], [0] * (-k) + [1])

    def __add__(self, other):
        other = _rf(other)
        return RF(
            padd(pmul(self.num, other.den), pmul(other.num, self.den)),
            pmul(self.den, other.den),
        )

    def __sub__(self, other):
        other = _rf(other)
        return RF(
            psub(pmul(self.num, other.den), pmul(other.num, self.den)),
            pmul(self.den, other.den),
        )

    def __mul__(self, other):
        other = _rf(other)
        return RF(pmul(self.num, other.num), pmul(self.den, other.den))

    def __truediv__(self, other):
        other = _rf(other)
        if pzero(other.num):
            raise ZeroDivisionError
        return RF(pmul(self.num, other.den), pmul(self.den, other.num))

    __radd__ = __add__
    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return pzero(self.num)

    def is_constant(self) -> bool:
        return pdeg(self.num) <= 0 and pdeg(self.den) == 0

    def constant_value(self) -> Rat:
        if not self.is_constant():
            raise ValueError(f"not constant: {self}")
        return self.num[0] / self.den[0] if self.num else Fraction(0)

    def eval(self, x) -> Rat:
        d = peval(self.den, Fraction(x))
        if d == 0:
            raise ZeroDivisionError(f"pole at {x}")
        return peval(self.num, Fraction(x)) / d

    def limit_at_infinity(self):
        """Value of the function as x -> oo; None encodes a pole there."""
        dn, dd = pdeg(self.num), pdeg(self.den)
        if dn > dd:
            return None
        if dn < dd:
            return Fraction(0)
        return self.num[-1] / self.den[-1]

    def shift_arg_inverse(self) -> "RF":
        """The function x -> self(1/x)."""
        dn, dd = pdeg(self.num), pdeg(self.den)
        d = max(dn, dd)
        num = [Fraction(0)] * (d + 1)
        den = [Fraction(0)] * (d + 1)
        for i, c in enumerate(self.num):
            num[d - i] = c
        for i, c in enumerate(self.den):
            den[d - i] = c
        return RF(num, den)

    def __repr__(self):
        if pdeg(self.den) == 0 and self.den == [Fraction(1)]:
            return pstr(self.num)
        return f"({pstr(self.num)}) / ({pstr(self.den)})"


def _rf(v) -> RF:
    if isinstance(v, RF):
        return v
    if isinstance(v, (int, Fraction)):
        return RF.const(v)
    return RF(v)


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RationalMap:
    """A covering map (x, y) -> (u(x), v(x)*y + w(x)) onto an elliptic curve.

    w is the even correction forced by targets with a1 or a3 nonzero; it is
    identically zero for Legendre-form targets.
    """

    u: RF
    v: RF
    w: RF
    target: EllipticCurve

    def apply(self, x: Rat, y: Rat) -> ECPoint:
        x, y = Fraction(x), Fraction(y)
        try:
            X = self.u.eval(x)
        except ZeroDivisionError:
            return INFINITY  # poles of the abscissa sit over the identity
        Y = self.v.eval(x) * y + self.w.eval(x)
        return ECPoint(X, Y)

    def apply_infinity(self, slope: Rat) -> ECPoint:
        """Image of a point at infinity of a degree-6 model with y ~ slope*x^3."""
        X = self.u.limit_at_infinity()
        if X is None:
            return INFINITY
        vx3 = self.v * RF.x_power(3)
        lim_v = vx3.limit_at_infinity()
        lim_w = self.w.limit_at_infinity()
        if lim_v is None or lim_w is None:
            raise MapDerivationFailed("unbounded ordinate over a finite abscissa")
        return ECPoint(X, Fraction(slope) * lim_v + lim_w)

    def residues(self, H: HyperCurve) -> tuple[RF, RF]:
        """Even and odd parts of the target equation pulled back along the map.

        Substituting X = u, Y = v*y + w and y^2 = F/lead splits the relation
        Y^2 + a1 X Y + a3 Y - (X^3 + a2 X^2 + a4 X + a6) into a y-free part
        and y times another x-function; the map is a morphism exactly when
        both vanish identically.
        """
        a1, a2, a3, a4, a6 = self.target.a_invariants()
        u, v, w = self.u, self.v, self.w
        y2 = RF(H.f()) / RF.const(H.lead)
        even = (
            v * v * y2
            + w * w
            + a1 * u * w
            + a3 * w
            - (u * u * u + a2 * u * u + a4 * u + a6)
        )
        odd = v * (w + w + a1 * u + a3)
        return even, odd

    def is_morphism(self, H: HyperCurve) -> bool:
        even, odd = self.residues(H)
        return even.is_zero() and odd.is_zero()

    def composed_with(self, pair: LegendrePair, target: EllipticCurve) -> "RationalMap":
        """Compose with the inverse Legendre substitution onto ``target``."""
        s = pair.scale
        u = self.u * RF.const(s * s) + RF.const(pair.shift)
        v = self.v * RF.const(s**3)
        w = (
            self.w * RF.const(s**3)
            - (u * RF.const(target.a1) + RF.const(target.a3)) * RF.const(Fraction(1, 2))
        )
        return RationalMap(u=u, v=v, w=w, target=target)


@dataclass(frozen=True)
class ScholtenDatum:
    """One glued model with its verified maps to the two elliptic factors."""

    params: tuple[Rat, Rat, Rat, Rat]
    curve: HyperCurve
    phi1: RationalMap
    phi2: RationalMap


def build_curve(alpha, beta, gamma, delta) -> HyperCurve:
    """The glued genus-2 model for the given parameters.

    Raises Degenerate when alpha*delta - beta*gamma = 0 or the right-hand
    side fails to be squarefree.
    """
    a, b, c, d = (Fraction(v) for v in (alpha, beta, gamma, delta))
    _check_params(a, b, c, d)
    lead = a * d - b * c
    if lead == 0:
        raise Degenerate("alpha*delta - beta*gamma = 0")
    F = pmul(pmul([-(c - d), 0, a - b], [-c, 0, a]), [-d, 0, b])
    if not is_squarefree(F):
        raise Degenerate("glued sextic is not squarefree")
    return HyperCurve(lead=lead, poly=tuple(F))


def _check_params(a, b, c, d):
    if 0 in (a, b, c, d):
        raise ValueError("parameters must be nonzero")
    if a == b or c == d:
        raise ValueError("need alpha != beta and gamma != delta")


def _solve_first_map(alpha, beta, gamma, delta, H: HyperCurve):
    """Exact undetermined-coefficient solve for u = A x^2 + B, v = C y.

    In the variable t = x^2 both sides of the pulled-back relation are cubics;
    an affine map t -> A t + B must carry the roots of one onto the roots of
    the other.  Each of the six root assignments gives an overdetermined
    linear system for (A, B); a consistent system with a rational square for
    C^2 yields the map.
    """
    a, b, c, d = alpha, beta, gamma, delta
    src_roots = [(c - d) / (a - b), c / a, d / b]
    dst_roots = [Fraction(0), a, b]
    perms = [
        (0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0),
    ]
    for perm in perms:
        t0, t1 = src_roots[0], src_roots[1]
        s0, s1 = dst_roots[perm[0]], dst_roots[perm[1]]
        if t0 == t1:
            continue
        A = (s1 - s0) / (t1 - t0)
        B = s0 - A * t0
        if A == 0:
            continue
        if A * src_roots[2] + B != dst_roots[perm[2]]:
            continue
        u = RF([B, 0, A])
        csq = (u * (u - RF.const(a)) * (u - RF.const(b))) * RF.const(H.lead) / RF(H.f())
        if not csq.is_constant():
            continue
        C = sqrt_fraction(csq.constant_value())
        if C is None:
            continue
        return A, B, C
    raise MapDerivationFailed(
        f"no rational covering map for parameters {(a, b, c, d)}"
    )


def build_maps(alpha, beta, gamma, delta, H: HyperCurve) -> tuple[RationalMap, RationalMap]:
    """The two verified degree-2 maps from H onto the Legendre-form factors."""
    a, b, c, d = (Fraction(v) for v in (alpha, beta, gamma, delta))
    zero = RF.const(0)

    A, B, C = _solve_first_map(a, b, c, d, H)
    E1 = LegendrePair(alpha=a, beta=b, shift=Fraction(0)).curve()
    phi1 = RationalMap(u=RF([B, 0, A]), v=RF([C]), w=zero, target=E1)

    # mirror curve: swap the parameter pairs and substitute x -> 1/x, y -> y/x^3,
    # so u2(x) = A2/x^2 + B2 = (B2 x^2 + A2)/x^2 and v2 = C2/x^3
    H_mirror = build_curve(c, d, a, b)
    A2, B2, C2 = _solve_first_map(c, d, a, b, H_mirror)
    E2 = LegendrePair(alpha=c, beta=d, shift=Fraction(0)).curve()
    phi2 = RationalMap(
        u=RF([A2, 0, B2], [0, 0, 1]), v=RF([C2], [0, 0, 0, 1]), w=zero, target=E2
    )

    for phi in (phi1, phi2):
        if not phi.is_morphism(H):
            raise MapDerivationFailed("derived map fails the symbolic morphism check")
    return phi1, phi2


# offsets: which Legendre root of x(x-alpha)(x-beta) each substitution moves to 0
_VARIANTS = (
    (lambda a, b: (a, b), lambda a, b: Fraction(0)),
    (lambda a, b: (b, a), lambda a, b: Fraction(0)),
    (lambda a, b: (-a, b - a), lambda a, b: a),
    (lambda a, b: (b - a, -a), lambda a, b: a),
    (lambda a, b: (-b, a - b), lambda a, b: b),
    (lambda a, b: (a - b, -b), lambda a, b: b),
)


def six_variants(alpha, beta, gamma, delta) -> list[ScholtenDatum]:
    """The up-to-six glued models from re-normalizing the first factor.

    Degenerate substitutions are skipped.  Every returned datum has its maps
    re-based onto the input models E_{alpha,beta} and E_{gamma,delta}, so all
    point decompositions for a pair happen on a single pair of curves.
    """
    a, b, c, d = (Fraction(v) for v in (alpha, beta, gamma, delta))
    _check_params(a, b, c, d)
    E1 = LegendrePair(alpha=a, beta=b, shift=Fraction(0)).curve()
    out = []
    for subst, offset in _VARIANTS:
        a2, b2 = subst(a, b)
        try:
            H = build_curve(a2, b2, c, d)
            phi1, phi2 = build_maps(a2, b2, c, d, H)
        except Degenerate:
            continue
        r = offset(a, b)
        if r != 0:
            # the variant model is E1 translated by -r; shifting back lands on E1
            iso = LegendrePair(alpha=a2, beta=b2, shift=r)
            phi1 = phi1.composed_with(iso, E1)
            if not phi1.is_morphism(H):
                raise MapDerivationFailed("re-based map fails the morphism check")
        out.append(ScholtenDatum(params=(a2, b2, c, d), curve=H, phi1=phi1, phi2=phi2))
    return out
