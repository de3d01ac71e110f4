"""Genus-2 Jacobian arithmetic and the rank-1 self-product criterion.

Curves are y^2 = f(x) with f squarefree of degree 5 or 6.  Divisor classes
are handled in Mumford form (u monic of degree <= 2, v with deg v < deg u,
u | v^2 - f) on an odd-degree model; a degree-6 input needs a rational
Weierstrass point, whose root is moved to infinity by x -> r + a/t.  That is
no loss for the self-product rule, which requires a rational Weierstrass
point anyway.  Cantor composition/reduction runs over Q or F_p through the
same code.

Torsion bounding: for odd primes of good reduction the torsion of J(Q)
injects into J(F_p), so the gcd B of a few group orders #J(F_p) bounds the
order of any torsion class; a class D is of infinite order iff n*D != 0 for
every divisor n of B, which is decided exactly over Q.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .curves import Rat
from .errors import BadReduction, Degenerate, NonInvertibleElement, NotWeierstrass
from .intarith import divisors, is_prime
from .polys import (
    GFp,
    QQ,
    clear_denominators,
    is_squarefree,
    pdeg,
    pdiff,
    pdivmod,
    peval,
    pmod,
    pmonic,
    pmul,
    pneg,
    pnorm,
    pshift,
    psub,
    pxgcd,
    rational_roots,
    resultant,
)


@dataclass(frozen=True)
class Genus2Curve:
    """y^2 = f(x), f squarefree of degree 5 or 6 over Q."""

    poly: tuple[Rat, ...]

    def __post_init__(self):
        object.__setattr__(self, "poly", tuple(Fraction(c) for c in self.poly))
        f = pnorm(list(self.poly))
        if pdeg(f) not in (5, 6):
            raise Degenerate(f"degree {pdeg(f)} is not a genus-2 model")
        if not is_squarefree(f):
            raise Degenerate("model polynomial is not squarefree")

    def f(self) -> list[Rat]:
        return pnorm(list(self.poly))

    def contains(self, x, y) -> bool:
        return Fraction(y) ** 2 == peval(self.f(), Fraction(x))

    def disc_scale(self) -> int:
        """Integer whose prime divisors are exactly the bad primes (with 2)."""
        fz, den = clear_denominators(self.f())
        fq = [Fraction(c) for c in fz]
        d = resultant(fq, pdiff(fq))
        return 2 * abs(int(d * fz[-1])) * den

    def rational_weierstrass_points(self):
        """Rational Weierstrass data: affine roots of f, plus None for the
        infinite point of a degree-5 model."""
        out: list[Fraction | None] = []
        if pdeg(self.f()) == 5:
            out.append(None)
        out.extend(rational_roots(self.f()))
        return out


@dataclass(frozen=True)
class MumfordDivisor:
    """Reduced Mumford pair on an odd model; field is 'Q' or a prime p."""

    u: tuple
    v: tuple
    field: object = "Q"

    def is_identity(self) -> bool:
        return len(self.u) == 1


class Jacobian:
    """Cantor arithmetic for y^2 = f(x), f monic of odd degree 5."""

    def __init__(self, f, field=QQ):
        self.F = field
        self.f = pnorm(list(f), field)
        if pdeg(self.f) != 5:
            raise ValueError("odd genus-2 model required (degree 5)")
        if not self.F.eq(self.f[-1], self.F.one):
            raise ValueError("odd model must be monic")

    # -- basic constructors -------------------------------------------------
    def identity(self) -> MumfordDivisor:
        return MumfordDivisor(u=(self.F.one,), v=(), field=self._tag())

    def _tag(self):
        return "Q" if self.F is QQ else self.F.p

    def point_divisor(self, x, y) -> MumfordDivisor:
        x, y = self.F.coerce(x), self.F.coerce(y)
        if not self.F.eq(y * y, peval(self.f, x, self.F)):
            raise ValueError("point not on the odd model")
        u = pnorm([-x, self.F.one], self.F)
        v = pnorm([y], self.F)
        return MumfordDivisor(u=tuple(u), v=tuple(v), field=self._tag())

    def negate(self, D: MumfordDivisor) -> MumfordDivisor:
        u = list(D.u)
        v = pmod(pneg(list(D.v), self.F), u, self.F)
        return MumfordDivisor(u=tuple(u), v=tuple(v), field=D.field)

    # -- group law ----------------------------------------------------------
    def add(self, D1: MumfordDivisor, D2: MumfordDivisor) -> MumfordDivisor:
        F = self.F
        u1, v1 = pnorm(list(D1.u), F), pnorm(list(D1.v), F)
        u2, v2 = pnorm(list(D2.u), F), pnorm(list(D2.v), F)
        try:
            d1, e1, e2 = pxgcd(u1, u2, F)
            d, c1, c2 = pxgcd(d1, _padd2(v1, v2, F), F)
        except ZeroDivisionError as exc:  # composite "prime" moduli only
            raise NonInvertibleElement(str(exc))
        s1 = pmul(c1, e1, F)
        s2 = pmul(c1, e2, F)
        s3 = c2
        num_u = pmul(u1, u2, F)
        dd = pmul(d, d, F)
        u3, rem = pdivmod(num_u, dd, F)
        assert not rem
        t = _padd2(
            _padd2(
                pmul(pmul(s1, u1, F), v2, F), pmul(pmul(s2, u2, F), v1, F), F
            ),
            pmul(s3, _padd2(pmul(v1, v2, F), self.f, F), F),
            F,
        )
        tq, trem = pdivmod(t, d, F)
        assert not trem
        v3 = pmod(tq, u3, F)
        # reduction to genus-2 size
        while pdeg(u3) > 2:
            num = psub(self.f, pmul(v3, v3, F), F)
            u3n, rem = pdivmod(num, u3, F)
            assert not rem
            u3 = pmonic(u3n, F)
            v3 = pmod(pneg(v3, F), u3, F)
        u3 = pmonic(u3, F)
        v3 = pmod(v3, u3, F)
        return MumfordDivisor(u=tuple(u3), v=tuple(v3), field=D1.field)

    def sub(self, D1, D2):
        return self.add(D1, self.negate(D2))

    def mul(self, n: int, D: MumfordDivisor) -> MumfordDivisor:
        if n < 0:
            return self.mul(-n, self.negate(D))
        acc = self.identity()
        base = D
        while n:
            if n & 1:
                acc = self.add(acc, base)
            n >>= 1
            if n:
                base = self.add(base, base)
        return acc

    def equal(self, D1, D2) -> bool:
        a = (tuple(pnorm(list(D1.u), self.F)), tuple(pnorm(list(D1.v), self.F)))
        b = (tuple(pnorm(list(D2.u), self.F)), tuple(pnorm(list(D2.v), self.F)))
        return a == b

    def reduce_mod(self, D: MumfordDivisor, p: int) -> MumfordDivisor:
        Fp = GFp(p)
        return MumfordDivisor(
            u=tuple(Fp.coerce(c) for c in D.u),
            v=tuple(Fp.coerce(c) for c in D.v),
            field=p,
        )


def _padd2(a, b, F):
    from .polys import padd

    return padd(a, b, F)


def cantor_add(J: Jacobian, D1: MumfordDivisor, D2: MumfordDivisor) -> MumfordDivisor:
    """Reduced sum of two reduced divisors (module-level convenience)."""
    return J.add(D1, D2)


# ---------------------------------------------------------------------------
# odd models for sextic inputs


@dataclass(frozen=True)
class OddModel:
    """y^2 = g(x), g monic quintic, isomorphic to the input model.

    A quintic input is rescaled to monic via (x, y) -> (a5 x, a5^2 y).  A
    sextic input has a rational Weierstrass root r moved to infinity via
    (x, y) -> (a5/(x-r), a5^2 y/(x-r)^3), where a5 is the leading
    coefficient of the degree-5 polynomial before monicization.
    """

    g: tuple[Rat, ...]
    root: Rat | None  # None when the input was already degree 5
    a5: Rat

    def jacobian(self, field=QQ) -> Jacobian:
        return Jacobian([field.coerce(c) for c in self.g], field)

    def map_point(self, x, y) -> tuple[Rat, Rat]:
        if self.root is None:
            return self.a5 * Fraction(x), self.a5**2 * Fraction(y)
        dx = Fraction(x) - self.root
        if dx == 0:
            raise ZeroDivisionError("the moved root has no affine image")
        return self.a5 / dx, self.a5**2 * Fraction(y) / dx**3

    def map_infinity(self, slope) -> tuple[Rat, Rat]:
        """Image of a sextic point at infinity with y ~ slope * x^3."""
        if self.root is None:
            raise ValueError("degree-5 model keeps its own infinite point")
        return Fraction(0), self.a5**2 * Fraction(slope)


def odd_model(C: Genus2Curve, root: Rat | None = None) -> OddModel:
    """An odd-degree monic model of C; sextics need a rational Weierstrass point.

    For a sextic, ``root`` picks which rational root goes to infinity
    (default: the smallest); raises NotWeierstrass if there is none.
    """
    f = C.f()
    if pdeg(f) == 5:
        a5 = f[-1]
        g = [c * a5 ** (4 - i) for i, c in enumerate(f)]
        return OddModel(g=tuple(g), root=None, a5=a5)
    roots = rational_roots(f)
    if not roots:
        raise NotWeierstrass("sextic model has no rational Weierstrass point")
    r = Fraction(root) if root is not None else min(roots)
    if peval(f, r) != 0:
        raise NotWeierstrass(f"{r} is not a root of the model polynomial")
    fs = pshift(f, r)  # f(r + s) has zero constant term
    assert fs[0] == 0
    f5 = pnorm([fs[6 - j] for j in range(6)])  # w^2 = sum_k fs[k] t^(6-k)
    a5 = f5[5]
    g = [c * a5 ** (4 - i) for i, c in enumerate(f5)]
    return OddModel(g=tuple(g), root=r, a5=a5)


def divisor_from_points(
    C: Genus2Curve, model: OddModel, P, W_root: Rat | None
) -> MumfordDivisor:
    """Reduced representative of [P] - [W] on the odd model.

    P is (x, y) affine or ('infinity', slope) for a sextic branch at
    infinity; W is a Weierstrass point given by its root (None = the
    infinite point, only meaningful when it is the moved root r or the
    quintic's own infinite point).  Since W is 2-torsion, [P] - [W] and
    [P] + [W] - 2*oo agree as classes, which is what is computed.
    """
    if W_root is not None and peval(C.f(), Fraction(W_root)) != 0:
        raise NotWeierstrass(f"{W_root} is not a Weierstrass abscissa")
    J = model.jacobian()
    if isinstance(P, tuple) and P[0] == "infinity":
        xP, yP = model.map_infinity(P[1])
    else:
        x, y = P
        if not C.contains(x, y):
            raise ValueError("point not on the curve")
        xP, yP = model.map_point(x, y)
    D = J.point_divisor(xP, yP)
    if W_root is None or (model.root is not None and W_root == model.root):
        return D  # W is the infinite point of the odd model
    xW, _ = model.map_point(W_root, 0)
    return J.add(D, J.point_divisor(xW, 0))


def point_to_divisor(C: Genus2Curve, P, W_root: Rat | None = None) -> MumfordDivisor:
    """Spec-level wrapper: reduced Mumford representative of [P] - [W]."""
    model = odd_model(C)
    return divisor_from_points(C, model, P, W_root)


# ---------------------------------------------------------------------------
# point counting and order bounding


def _count_points_gfp(f_int: list[int], p: int, deg: int) -> int:
    sq = [False] * p
    for i in range((p + 1) // 2 + 1):
        sq[i * i % p] = True
    fp = [c % p for c in f_int]
    count = 0
    for x in range(p):
        acc = 0
        for c in reversed(fp):
            acc = (acc * x + c) % p
        if acc == 0:
            count += 1
        elif sq[acc]:
            count += 2
    # points at infinity
    if deg == 5:
        count += 1
    else:
        lc = fp[6] if len(fp) > 6 else 0
        assert lc != 0, "good reduction keeps the degree"
        count += 2 if sq[lc] else 0
    return count


def _find_gfp2_modulus(p: int) -> tuple[int, int]:
    """Lexicographically first (a, b) with t^2 + a t + b irreducible mod p."""
    for a in range(p):
        for b in range(p):
            disc = (a * a - 4 * b) % p
            if disc == 0:
                continue
            if pow(disc, (p - 1) // 2, p) == p - 1:
                return a, b
    raise AssertionError("no irreducible quadratic found (p prime?)")


def _count_points_gfp2(f_int: list[int], p: int, deg: int) -> int:
    a, b = _find_gfp2_modulus(p)
    q = p * p
    half = (q - 1) // 2

    def mul(u, v):
        # (u0 + u1 t)(v0 + v1 t) mod t^2 + a t + b
        hi = u[1] * v[0] + u[0] * v[1]
        lo = u[0] * v[0]
        sq_t = u[1] * v[1]
        return ((lo - sq_t * b) % p, (hi - sq_t * a) % p)

    def power(u, n):
        acc = (1, 0)
        base = u
        while n:
            if n & 1:
                acc = mul(acc, base)
            n >>= 1
            base = mul(base, base)
        return acc

    fp = [c % p for c in f_int]
    count = 0
    for x0 in range(p):
        for x1 in range(p):
            x = (x0, x1)
            acc = (0, 0)
            for c in reversed(fp):
                acc = mul(acc, x)
                acc = ((acc[0] + c) % p, acc[1])
            if acc == (0, 0):
                count += 1
            elif power(acc, half) == (1, 0):
                count += 2
    if deg == 5:
        count += 1
    else:
        count += 2  # every F_p scalar is a square in F_{p^2}
    return count


def jacobian_order_mod_p(C: Genus2Curve, p: int) -> int:
    """#J(F_p) from #C(F_p) and #C(F_{p^2}) via the zeta coefficients.

    With c1 = #C(F_p) - (p+1) and c2 = (#C(F_{p^2}) - p^2 - 1 + c1^2)/2 the
    order is 1 + c1 + c2 + c1*p + p^2.  Raises BadReduction for even p or
    p dividing the cleared discriminant data.
    """
    if p == 2 or not is_prime(p):
        raise BadReduction(f"{p} is not an odd prime")
    if C.disc_scale() % p == 0:
        raise BadReduction(f"bad reduction at {p}")
    f_int, _ = clear_denominators(C.f())
    deg = pdeg(C.f())
    n1 = _count_points_gfp(f_int, p, deg)
    n2 = _count_points_gfp2(f_int, p, deg)
    c1 = n1 - (p + 1)
    assert c1 * c1 <= 16 * p, "Hasse-Weil bound violated; counting bug"
    c2, rem = divmod(n2 - p * p - 1 + c1 * c1, 2)
    assert rem == 0
    order = 1 + c1 + c2 + c1 * p + p * p
    assert order > 0
    return order


def good_odd_primes(C: Genus2Curve, count: int, start: int = 3) -> list[int]:
    bad = C.disc_scale()
    out = []
    p = start
    while len(out) < count:
        if is_prime(p) and bad % p != 0:
            out.append(p)
        p += 2
    return out


def is_infinite_order(
    C: Genus2Curve, D: MumfordDivisor, primes: list[int], model: OddModel | None = None
) -> tuple[bool, dict]:
    """Exact infinite-order test for a class over Q, with a transcript.

    Torsion of J(Q) injects into J(F_p) at odd good p, so any torsion order
    divides B = gcd_p #J(F_p); the class has infinite order iff n*D != 0
    for every divisor n of B, checked exactly over Q.
    """
    if len(primes) < 2:
        raise ValueError("need at least 2 good primes")
    orders = {}
    for p in primes:
        orders[p] = jacobian_order_mod_p(C, p)
    B = 0
    for v in orders.values():
        B = v if B == 0 else math.gcd(B, v)
    model = model or odd_model(C)
    J = model.jacobian()
    tested = []
    infinite = True
    for n in divisors(B):
        hit = J.mul(n, D).is_identity()
        tested.append({"n": n, "kills": hit})
        if hit:
            infinite = False
            break
    transcript = {
        "primes": primes,
        "orders": orders,
        "torsion_bound": B,
        "tested_multiples": tested,
    }
    return infinite, transcript


# ---------------------------------------------------------------------------
# the rank-1 self-product certificate

from .certmodel import Certificate, Undecided, enc_fraction, enc_poly  # noqa: E402


def _enc_g2_point(P) -> dict:
    if isinstance(P, tuple) and P[0] == "infinity":
        return {"infinity": enc_fraction(P[1])}
    return {"x": enc_fraction(P[0]), "y": enc_fraction(P[1])}


def certify_self_product(
    C: Genus2Curve,
    rank: int,
    bound: int = 1000,
    provenance: dict | None = None,
    label: str | None = None,
    primes_count: int = 5,
    max_candidates: int = 40,
):
    """Finiteness certificate for the self-product of a genus-2 curve.

    rank 0 certifies outright; rank 1 needs a rational Weierstrass point W
    and another rational point P with [P] - [W] of infinite order, which is
    established exactly through reduction orders and Cantor multiples.  Any
    other rank (or a failed search) yields Undecided.  The Jacobian rank is
    ingested data, never computed here.
    """
    provenance = dict(provenance or {})
    subject = {"label": label, "genus2_poly": enc_poly(C.poly)}
    if rank == 0:
        return Certificate(
            rule="rank0",
            subjects=[subject],
            witnesses={"f": enc_poly(C.poly), "rank": 0},
            transcript=[
                {"check": "genus2_model"},
                {
                    "check": "rank_data",
                    "subject": 0,
                    "rank": 0,
                    "source": provenance.get("rank_source", "user"),
                },
            ],
            provenance=dict(provenance, external_dependencies=["rank data"]),
        )
    if rank != 1:
        return Undecided(reason="rule_needs_rank_zero_or_one", details={"rank": rank})

    wpoints = C.rational_weierstrass_points()
    if not wpoints:
        return Undecided(reason="no_rational_weierstrass_point", details={})

    from .hpoints import search
    from .scholten import HyperCurve

    H = HyperCurve(lead=1, poly=tuple(C.poly))
    pts = search(H, bound)
    candidates = []
    for pt in pts:
        if pt.at_infinity:
            if pdeg(C.f()) == 6 and pt.slope is not None:
                candidates.append(("infinity", pt.slope))
        elif pt.y != 0:
            candidates.append((pt.x, pt.y))
    if not candidates:
        return Undecided(reason="no_non_weierstrass_point_within_bound",
                         details={"bound": bound})

    primes = good_odd_primes(C, primes_count)
    orders = {p: jacobian_order_mod_p(C, p) for p in primes}
    B = 0
    for v in orders.values():
        B = v if B == 0 else math.gcd(B, v)
    divs = divisors(B)

    for W in wpoints:
        model = odd_model(C, W)
        J = model.jacobian()
        for P in candidates[:max_candidates]:
            D = divisor_from_points(C, model, P, W)
            tested = []
            torsion = False
            for n in divs:
                kills = J.mul(n, D).is_identity()
                tested.append(n)
                if kills:
                    torsion = True
                    break
            if torsion:
                continue
            witnesses = {
                "f": enc_poly(C.poly),
                "rank": 1,
                "weierstrass": None if W is None else enc_fraction(W),
                "point": _enc_g2_point(P),
                "odd_model": {
                    "g": enc_poly(model.g),
                    "root": None if model.root is None else enc_fraction(model.root),
                    "a5": enc_fraction(model.a5),
                },
                "divisor": {"u": enc_poly(D.u), "v": enc_poly(D.v)},
                "primes": primes,
                "orders": {str(p): orders[p] for p in primes},
                "torsion_bound": B,
            }
            transcript = [
                {"check": "genus2_model"},
                {"check": "weierstrass_root"},
                {"check": "genus2_point"},
                {"check": "odd_model_consistent"},
                {"check": "divisor_matches"},
            ]
            for p in primes:
                transcript.append({"check": "jacobian_order", "prime": p})
            transcript.append({"check": "torsion_bound"})
            for n in divs:
                transcript.append({"check": "multiple_nonzero", "n": n})
            transcript.append(
                {
                    "check": "rank_data",
                    "subject": 0,
                    "rank": 1,
                    "source": provenance.get("rank_source", "user"),
                }
            )
            return Certificate(
                rule="hyperselfproduct",
                subjects=[subject],
                witnesses=witnesses,
                transcript=transcript,
                provenance=dict(provenance, external_dependencies=["rank data"]),
            )
    return Undecided(
        reason="all_candidate_classes_torsion",
        details={"bound": bound, "candidates": len(candidates)},
    )
