"""Dense univariate polynomial arithmetic over Q (Fraction) or F_p.

Polynomials are plain lists of coefficients, lowest degree first, with no
trailing zeros; the zero polynomial is [].  All routines are exact.  The
field is passed explicitly so the same code serves Jacobian arithmetic over
Q and over prime fields.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .intarith import divisors


class QQ:
    """The rationals, via fractions.Fraction."""

    zero = Fraction(0)
    one = Fraction(1)

    @staticmethod
    def coerce(x):
        return Fraction(x)

    @staticmethod
    def inv(a):
        return 1 / Fraction(a)

    @staticmethod
    def eq(a, b):
        return a == b


class GFp:
    """The prime field F_p, elements as ints in [0, p)."""

    def __init__(self, p: int):
        self.p = p
        self.zero = 0
        self.one = 1 % p

    def coerce(self, x):
        if isinstance(x, Fraction):
            num = x.numerator % self.p
            den = x.denominator % self.p
            if den == 0:
                raise ZeroDivisionError(f"denominator divisible by {self.p}")
            return num * pow(den, self.p - 2, self.p) % self.p
        return x % self.p

    def inv(self, a):
        a %= self.p
        if a == 0:
            raise ZeroDivisionError(f"0 has no inverse mod {self.p}")
        return pow(a, self.p - 2, self.p)

    def eq(self, a, b):
        return (a - b) % self.p == 0


def pnorm(f, F=QQ):
    f = [F.coerce(c) for c in f]
    while f and F.eq(f[-1], F.zero):
        f.pop()
    return f


def pzero(f) -> bool:
    return len(f) == 0


def pdeg(f) -> int:
    """Degree; the zero polynomial gets -1."""
    return len(f) - 1


def padd(f, g, F=QQ):
    n = max(len(f), len(g))
    out = []
    for i in range(n):
        a = f[i] if i < len(f) else F.zero
        b = g[i] if i < len(g) else F.zero
        out.append(a + b)
    return pnorm(out, F)


def pneg(f, F=QQ):
    return [-c for c in f] if F is QQ else [(-c) % F.p for c in f]


def psub(f, g, F=QQ):
    return padd(f, pneg(g, F), F)


def pscale(f, a, F=QQ):
    a = F.coerce(a)
    if F.eq(a, F.zero):
        return []
    return pnorm([a * c for c in f], F)


def pmul(f, g, F=QQ):
    if not f or not g:
        return []
    out = [F.zero] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        for j, b in enumerate(g):
            out[i + j] += a * b
    return pnorm(out, F)


def pdivmod(f, g, F=QQ):
    """Quotient and remainder of f by g (g != 0)."""
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    f = list(f)
    q = [F.zero] * max(0, len(f) - len(g) + 1)
    inv_lead = F.inv(g[-1])
    while len(f) >= len(g):
        c = f[-1] * inv_lead
        c = F.coerce(c)
        if not F.eq(c, F.zero):
            k = len(f) - len(g)
            q[k] = c
            for i, b in enumerate(g):
                f[k + i] -= c * b
        f.pop()
    return pnorm(q, F), pnorm(f, F)


def pmod(f, g, F=QQ):
    return pdivmod(f, g, F)[1]


def pgcd(f, g, F=QQ):
    """Monic gcd."""
    f, g = pnorm(f, F), pnorm(g, F)
    while g:
        f, g = g, pmod(f, g, F)
    if f:
        f = pscale(f, F.inv(f[-1]), F)
    return f


def pxgcd(f, g, F=QQ):
    """(d, s, t) with s*f + t*g = d, d monic."""
    r0, r1 = pnorm(f, F), pnorm(g, F)
    s0, s1 = [F.one], []
    t0, t1 = [], [F.one]
    while r1:
        q, r = pdivmod(r0, r1, F)
        r0, r1 = r1, r
        s0, s1 = s1, psub(s0, pmul(q, s1, F), F)
        t0, t1 = t1, psub(t0, pmul(q, t1, F), F)
    if r0:
        c = F.inv(r0[-1])
        r0, s0, t0 = pscale(r0, c, F), pscale(s0, c, F), pscale(t0, c, F)
    return r0, s0, t0


def pdiff(f, F=QQ):
    return pnorm([i * c for i, c in enumerate(f)][1:], F)


def peval(f, x, F=QQ):
    acc = F.zero
    for c in reversed(f):
        acc = acc * x + c
    return F.coerce(acc)


def pshift(f, a, F=QQ):
    """f(x + a) by Horner composition."""
    out = []
    for c in reversed(f):
        out = padd(pmul(out, [F.coerce(a), F.one], F), [c], F)
    return out


def pcompose(f, g, F=QQ):
    """f(g(x))."""
    out = []
    for c in reversed(f):
        out = padd(pmul(out, g, F), [c], F)
    return out


def preverse(f, n: int, F=QQ):
    """x^n * f(1/x); requires n >= deg f."""
    if n < pdeg(f):
        raise ValueError("reversal order below degree")
    out = [F.zero] * (n + 1)
    for i, c in enumerate(f):
        out[n - i] = c
    return pnorm(out, F)


def is_squarefree(f, F=QQ) -> bool:
    return pdeg(pgcd(f, pdiff(f, F), F)) <= 0


def pmonic(f, F=QQ):
    if not f:
        return f
    return pscale(f, F.inv(f[-1]), F)


def clear_denominators(f) -> tuple[list[int], int]:
    """(g, d) with integer g = d*f, d > 0 minimal."""
    d = 1
    for c in f:
        d = d * c.denominator // math.gcd(d, c.denominator)
    return [int(c * d) for c in f], d


def content(f: list[int]) -> int:
    g = 0
    for c in f:
        g = math.gcd(g, c)
    return g


def resultant(f, g):
    """Resultant of f, g over Q via the Euclidean algorithm (exact)."""
    f, g = pnorm(f), pnorm(g)
    if not f or not g:
        return Fraction(0)
    res = Fraction(1)
    while True:
        df, dg = pdeg(f), pdeg(g)
        if dg == 0:
            return res * g[0] ** df
        r = pmod(f, g)
        if not r:
            return Fraction(0)
        dr = pdeg(r)
        res *= Fraction((-1) ** (df * dg)) * g[-1] ** (df - dr)
        f, g = g, r


def rational_roots(f) -> list[Fraction]:
    """All rational roots of f over Q (without multiplicity), sorted."""
    f = pnorm(f)
    if not f:
        raise ValueError("zero polynomial has every root")
    roots = set()
    # strip x | f
    k = 0
    while f and f[0] == 0:
        f = f[1:]
        k += 1
    if k:
        roots.add(Fraction(0))
    if pdeg(f) >= 1:
        fz, _ = clear_denominators(f)
        c = content(fz)
        if c:
            fz = [a // c for a in fz]
        a0, an = abs(fz[0]), abs(fz[-1])
        for p in divisors(a0):
            for q in divisors(an):
                if math.gcd(p, q) != 1:
                    continue
                for cand in (Fraction(p, q), Fraction(-p, q)):
                    if peval(f, cand) == 0:
                        roots.add(cand)
    return sorted(roots)


def pstr(f, var: str = "x") -> str:
    """Human-readable rendering, highest degree first."""
    if not f:
        return "0"
    parts = []
    for i in range(len(f) - 1, -1, -1):
        c = f[i]
        if c == 0:
            continue
        if i == 0:
            parts.append(f"{c}")
        else:
            mon = var if i == 1 else f"{var}^{i}"
            if c == 1:
                parts.append(mon)
            elif c == -1:
                parts.append(f"-{mon}")
            else:
                parts.append(f"{c}*{mon}")
    return " + ".join(parts).replace("+ -", "- ")
