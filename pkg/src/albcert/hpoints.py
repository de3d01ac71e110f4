"""Bounded-height rational point search on hyperelliptic models.

A candidate x = p/q (gcd(p,q) = 1, |p| <= bound, 1 <= q <= bound) lies on
lead*y^2 = F(x) iff W(p,q) = c * sum f_i p^i q^(6-i) is a perfect square in
Z, where c and the f_i form the integer-cleared model; then
y = sqrt(W)/(c q^3).

The sieve works per denominator q: for each small prime l the admissible
residues p mod l form a set depending only on q mod l, so the p-axis mask is
an AND of precomputed bit-packed periodic rows (one gather + a handful of
byte ANDs per q).  Survivors pass a vectorized composite-modulus square test
and only the remainder reaches the exact big-integer check.  Even models
(every Scholten sextic is even) are searched on p >= 0 and mirrored.

``search_naive`` is the brute-force completeness oracle for small bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .intarith import sqrt_fraction
from .polys import clear_denominators, pnorm
from .scholten import HyperCurve, ScholtenDatum

_SIEVE_PRIMES = (3, 5, 7, 11, 13, 17, 19, 23, 29, 31)
_M2 = 37 * 41 * 43 * 47  # second-stage composite modulus


def _square_residues(m: int) -> np.ndarray:
    table = np.zeros(m, dtype=bool)
    idx = np.arange(m, dtype=np.int64)
    table[(idx * idx) % m] = True
    return table


_SQ2 = _square_residues(_M2)


@dataclass(frozen=True, order=True)
class HPoint:
    """An affine point (x, y) or a point at infinity tagged by its branch.

    A degree-6 model with lead * (top coefficient) a nonzero square has two
    rational points at infinity, distinguished by the slope s = lim y/x^3;
    a degree-5 model has a single one (slope None).
    """

    at_infinity: bool
    x: Fraction | None = None
    y: Fraction | None = None
    slope: Fraction | None = None

    @classmethod
    def affine(cls, x, y) -> "HPoint":
        return cls(at_infinity=False, x=Fraction(x), y=Fraction(y))

    @classmethod
    def infinity(cls, slope=None) -> "HPoint":
        return cls(at_infinity=True, slope=None if slope is None else Fraction(slope))

    def __repr__(self):
        if self.at_infinity:
            return f"oo[{self.slope}]"
        return f"({self.x}, {self.y})"


def _integer_model(H: HyperCurve) -> tuple[int, list[int]]:
    """(c, f) integers such that c*y^2 = f(x) has the same point set as H."""
    coeffs = [Fraction(H.lead)] + list(pnorm(list(H.poly)))
    ints, _ = clear_denominators(coeffs)
    return ints[0], ints[1:]


def infinity_points(H: HyperCurve) -> list[HPoint]:
    """Rational points at infinity, slope-ascending."""
    if H.degree == 5:
        return [HPoint.infinity()]
    s = H.infinite_branch_slope()
    if s is None:
        return []
    return [HPoint.infinity(-s), HPoint.infinity(s)]


def _exact_w(c: int, f: list[int], p: int, q: int) -> int:
    qp = [1]
    for _ in range(6):
        qp.append(qp[-1] * q)
    return c * sum(fi * p**i * qp[6 - i] for i, fi in enumerate(f) if fi)


def _points_for_x(c: int, f: list[int], p: int, q: int) -> list[HPoint]:
    W = _exact_w(c, f, p, q)
    if W < 0:
        return []
    r = math.isqrt(W)
    if r * r != W:
        return []
    x = Fraction(p, q)
    if r == 0:
        return [HPoint.affine(x, 0)]
    y = Fraction(r, c * q**3)
    return [HPoint.affine(x, -y), HPoint.affine(x, y)]


class _Sieve:
    """Per-curve sieve state: residue tables and bit-packed p-axis rows."""

    def __init__(self, H: HyperCurve, bound: int):
        self.c, f = _integer_model(H)
        self.f = f + [0] * (7 - len(f))
        self.bound = bound
        self.even = all(coef == 0 for coef in self.f[1::2])
        self.ps = np.arange(0 if self.even else -bound, bound + 1, dtype=np.int64)
        self.npts = len(self.ps)
        self.rows = {}  # l -> array [l][packed row bytes]
        for l in _SIEVE_PRIMES:
            sq = _square_residues(l)
            table = np.zeros((l, l), dtype=bool)
            for qr in range(l):
                qp = [pow(qr, k, l) for k in range(7)]
                for pr in range(l):
                    acc = 0
                    pp = 1
                    for i in range(7):
                        acc = (acc + self.f[i] * pp * qp[6 - i]) % l
                        pp = pp * pr % l
                    table[qr, pr] = sq[acc * self.c % l]
            pmod = (self.ps % l).astype(np.int64)
            packed = np.zeros((l, (self.npts + 7) // 8), dtype=np.uint8)
            for qr in range(l):
                packed[qr] = np.packbits(table[qr][pmod])
            self.rows[l] = packed
        self.f2 = [fi % _M2 for fi in self.f]
        self.c2 = self.c % _M2

    def candidates(self, q: int) -> np.ndarray:
        """Indices into self.ps passing all stages for this denominator."""
        acc = self.rows[_SIEVE_PRIMES[0]][q % _SIEVE_PRIMES[0]]
        for l in _SIEVE_PRIMES[1:]:
            acc = acc & self.rows[l][q % l]
        bits = np.unpackbits(acc, count=self.npts)
        idx = np.nonzero(bits)[0]
        if idx.size == 0:
            return idx
        # vectorized second stage mod _M2
        pv = self.ps[idx] % _M2
        accv = np.zeros(idx.shape, dtype=np.int64)
        qk = 1
        coeffs = []
        for i in range(7):
            coeffs.append(self.f2[6 - i] * qk % _M2)
            qk = qk * q % _M2
        for cc in coeffs:
            accv = (accv * pv + cc) % _M2
        keep = _SQ2[accv * self.c2 % _M2]
        return idx[keep]


def iter_search(H: HyperCurve, bound: int, include_infinity: bool = True):
    """Yield points in deterministic order: infinity first, then by (q, p, y)."""
    if bound < 1:
        raise ValueError("bound must be >= 1")
    if include_infinity:
        yield from infinity_points(H)
    sv = _Sieve(H, bound)
    c, f = sv.c, sv.f
    for q in range(1, bound + 1):
        idx = sv.candidates(q)
        if idx.size == 0:
            continue
        found = []
        for p in (int(sv.ps[i]) for i in idx):
            if math.gcd(p, q) != 1:
                continue
            pts = _points_for_x(c, f, p, q)
            if not pts:
                continue
            found.extend(pts)
            if sv.even and p > 0:
                found.extend(HPoint.affine(-pt.x, pt.y) for pt in pts)
        found.sort(key=lambda pt: (pt.x, pt.y))
        yield from found


def search(H: HyperCurve, bound: int, include_infinity: bool = True) -> list[HPoint]:
    """All rational points with x = p/q, |p| <= bound, q <= bound (plus infinity).

    Deterministic order: points at infinity by ascending slope, then affine
    points by increasing denominator, then numerator, then ordinate.
    """
    return list(iter_search(H, bound, include_infinity))


def search_naive(H: HyperCurve, bound: int, include_infinity: bool = True) -> list[HPoint]:
    """Exhaustive double loop; the completeness oracle for the sieve path."""
    if bound < 1:
        raise ValueError("bound must be >= 1")
    out = infinity_points(H) if include_infinity else []
    f = H.rhs_over_lead()
    for q in range(1, bound + 1):
        for p in range(-bound, bound + 1):
            if math.gcd(p, q) != 1:
                continue
            x = Fraction(p, q)
            val = Fraction(0)
            for coef in reversed(f):
                val = val * x + coef
            y = sqrt_fraction(val)
            if y is None:
                continue
            if y == 0:
                out.append(HPoint.affine(x, 0))
            else:
                out.append(HPoint.affine(x, -y))
                out.append(HPoint.affine(x, y))
    return out


def search_all_variants(
    data: list[ScholtenDatum], bound: int
) -> list[tuple[HPoint, int]]:
    """Union of per-variant searches, tagged by variant index."""
    out = []
    for idx, datum in enumerate(data):
        for pt in search(datum.curve, bound):
            out.append((pt, idx))
    return out
