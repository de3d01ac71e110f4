"""Canonical heights, height pairings, and Mordell-Weil decompositions.

Normalization: hhat(P) = lim 4^(-n) * log max(|p_n|, |q_n|) where
x(2^n P) = p_n/q_n in lowest terms on an integral model.  The package is
internally consistent and never compares against external height tables.

The certified path computes the telescoped series

    hhat(P) = h_0 + sum_n 4^(-(n+1)) * (delta_n - log g_n)

where, writing Phi, Psi for the integer duplication forms with
x(2P) = Phi(p,q)/Psi(p,q),

    delta_n = log max(|Phi(v_n)|, |Psi(v_n)|) - 4 log max |v_n|

is scale-invariant in the representative v_n of (p_n : q_n) and is evaluated
in outward-rounded interval arithmetic, while g_n = gcd(Phi(p_n,q_n),
Psi(p_n,q_n)) divides the resultant of the forms and is recovered exactly by
tracking the orbit p-adically at the primes of that resultant.  The tail is
bounded through an explicit constant from the forms' coefficients and a
Bezout identity, so every height carries a guaranteed error interval.

Heights only ever *propose* decompositions; each candidate relation
a_1 R_1 + ... + a_r R_r = d Q + T is verified exactly by the group law
before it is accepted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from mpmath import iv, mp, mpf

from .curves import ECPoint, EllipticCurve, add, is_torsion, negate, scalar_mul
from .errors import DenomBoundTooSmall, PrecisionExhausted
from .intarith import factorint
from .polys import clear_denominators, pxgcd, resultant

DEFAULT_PRECISION = 128
DEFAULT_DENOM_BOUND = 64
_PROPOSAL_TOL = 0.02
_COEFF_LIMIT = 4000
_VERIFY_BUDGET_NATS = 3.0e5

# ---------------------------------------------------------------------------
# duplication data, cached per curve


@dataclass(frozen=True)
class DuplicationData:
    scale: int  # u with (x, y) -> (u^2 x, u^3 y) integral
    phi: tuple[int, ...]  # x^4 - b4 x^2 - 2 b6 x - b8, low degree first
    psi4: tuple[int, ...]  # q-homogenized 4 x^3 + b2 x^2 + 2 b4 x + b6
    res: int  # resultant of the two degree-4 forms
    prime_caps: dict  # p -> v_p(res); every g_n divides res
    step_bound: float  # upper bound for |h_{n+1} - 4 h_n|


_DUP_CACHE: dict = {}


def duplication_data(E: EllipticCurve) -> DuplicationData:
    key = E.a_invariants()
    hit = _DUP_CACHE.get(key)
    if hit is not None:
        return hit

    u = 1
    for a in key:
        u = math.lcm(u, a.denominator)
    a1 = int(key[0] * u)
    a2 = int(key[1] * u**2)
    a3 = int(key[2] * u**3)
    a4 = int(key[3] * u**4)
    a6 = int(key[4] * u**6)
    b2 = a1 * a1 + 4 * a2
    b4 = 2 * a4 + a1 * a3
    b6 = a3 * a3 + 4 * a6
    b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4

    phi = (-b8, -2 * b6, -b4, 0, 1)
    psi = (b6, 2 * b4, b2, 4)
    psi4 = psi + (0,)  # Psi(p, q) = sum psi4[i] p^i q^(4-i)
    R = resultant([Fraction(c) for c in phi], [Fraction(c) for c in psi])
    assert R != 0 and R.denominator == 1, "duplication forms must be coprime"
    R = int(R)
    caps = dict(factorint(R))

    # Bezout identities A*Phi + B*Psi = e*q^7 (and the p^7 mirror) give the
    # lower half of the step estimate |h(2P) - 4 h(P)| <= step_bound.
    def bezout_norm(f, g):
        d, s, t = pxgcd([Fraction(c) for c in f], [Fraction(c) for c in g])
        assert len(d) == 1
        sz, ds = clear_denominators(s)
        tz, dt = clear_denominators(t)
        m = math.lcm(ds, dt)
        sz = [c * (m // ds) for c in sz]
        tz = [c * (m // dt) for c in tz]
        k = sum(abs(c) for c in sz) + sum(abs(c) for c in tz)
        return m, k

    e1, k1 = bezout_norm(phi, psi)
    e2, k2 = bezout_norm(tuple(reversed(phi)), tuple(reversed(psi4)))
    upper = math.log(sum(abs(c) for c in phi) + sum(abs(c) for c in psi) + 1)
    lower = math.log(max(k1, k2) + 1) + math.log(abs(e1 * e2) + 1)
    step = max(upper, lower) + math.log(abs(R) + 1) + 1.0

    dd = DuplicationData(
        scale=u, phi=phi, psi4=psi4, res=R, prime_caps=caps, step_bound=step
    )
    _DUP_CACHE[key] = dd
    return dd


def _reduced_x(dd: DuplicationData, P: ECPoint) -> tuple[int, int]:
    x = Fraction(P.x) * dd.scale * dd.scale
    return x.numerator, x.denominator


def _form_eval_exact(coeffs, x: int, y: int) -> int:
    deg = len(coeffs) - 1
    acc = 0
    xp = 1
    yp = [1]
    for _ in range(deg):
        yp.append(yp[-1] * y)
    for i, c in enumerate(coeffs):
        if c:
            acc += c * xp * yp[deg - i]
        xp *= x
    return acc


def _form_eval_mod(coeffs, x: int, y: int, mod: int) -> int:
    deg = len(coeffs) - 1
    acc = 0
    xp = 1
    yp = [1]
    for _ in range(deg):
        yp.append(yp[-1] * y % mod)
    for i, c in enumerate(coeffs):
        if c:
            acc = (acc + c * xp * yp[deg - i]) % mod
        xp = xp * x % mod
    return acc


def _vp_capped(n: int, p: int, cap: int) -> int:
    if n == 0:
        return cap
    v = 0
    while v < cap and n % p == 0:
        n //= p
        v += 1
    return v


def _gcd_valuation_series(dd: DuplicationData, p0: int, q0: int, N: int) -> dict:
    """c_n(p) = v_p(g_n) for n < N at each prime of the resultant.

    Tracks the projective orbit (p_n : q_n) modulo a prime power; the
    representative is only defined up to units, which is harmless because
    the forms are homogeneous.  Capacity shrinks by c_n <= v_p(res) per
    step, so the initial exponent (N+1)*cap + 8 keeps every valuation
    readable.
    """
    out = {}
    for p, cap in dd.prime_caps.items():
        capacity = (N + 1) * cap + 8
        mod = p**capacity
        a, b = p0 % mod, q0 % mod
        series = []
        for _ in range(N):
            A = _form_eval_mod(dd.phi, a, b, mod)
            B = _form_eval_mod(dd.psi4, a, b, mod)
            c = min(_vp_capped(A, p, cap + 1), _vp_capped(B, p, cap + 1))
            c = min(c, cap)  # g_n | res bounds the true valuation
            series.append(c)
            pe = p**c
            capacity -= c
            mod = p**capacity
            a, b = A // pe % mod, B // pe % mod
        out[p] = series
    return out


# ---------------------------------------------------------------------------
# certified interval series


def _iv_max_abs(x, y):
    ax, ay = abs(x), abs(y)
    lo = ax.a if ax.a > ay.a else ay.a
    hi = ax.b if ax.b > ay.b else ay.b
    return iv.mpf([lo, hi])


def _iv_form(coeffs, A, B):
    """Interval evaluation of a degree-(len-1) homogeneous form at (A, B)."""
    deg = len(coeffs) - 1
    acc = iv.mpf(0)
    Apows = [iv.mpf(1)]
    Bpows = [iv.mpf(1)]
    for _ in range(deg):
        Apows.append(Apows[-1] * A)
        Bpows.append(Bpows[-1] * B)
    for i, c in enumerate(coeffs):
        if c:
            acc += iv.mpf(c) * Apows[i] * Bpows[deg - i]
    return acc


def _iterations_for(target_bits: int, step_bound: float) -> int:
    extra = math.log2(step_bound / 3 + 2)
    return max(8, math.ceil((target_bits + 2 + extra) / 2) + 1)


def _series_interval(dd: DuplicationData, p0: int, q0: int, target_bits: int):
    """(lo, hi) mpf interval certified to contain hhat, or None to give up."""
    N = _iterations_for(target_bits, dd.step_bound)
    cvals = _gcd_valuation_series(dd, p0, q0, N)
    tail = dd.step_bound / 3 * 4.0 ** (-N) * 1.01 + 1e-300

    prec = target_bits + 96
    for _ in range(5):
        iv.prec = prec
        A, B = iv.mpf(p0), iv.mpf(q0)
        logmax = iv.log(_iv_max_abs(A, B))
        total = logmax
        ok = True
        for n in range(N):
            A2 = _iv_form(dd.phi, A, B)
            B2 = _iv_form(dd.psi4, A, B)
            m = _iv_max_abs(A2, B2)
            if not (m.a > 0 and math.isfinite(float(m.b))):
                ok = False
                break
            logm = iv.log(m)
            total += (logm - 4 * logmax) * iv.mpf(2) ** (-2 * (n + 1))
            # rescale by an exact power of two to keep magnitudes near 1
            shift = int(mp.floor(mp.log(mpf(m.mid), 2)))
            sc = iv.mpf(2) ** (-shift)
            A, B = A2 * sc, B2 * sc
            logmax = logm - shift * iv.log(iv.mpf(2))
        if ok:
            for p, series in cvals.items():
                num = sum(c * 4 ** (N - 1 - n) for n, c in enumerate(series))
                coef = iv.mpf(num) * iv.mpf(2) ** (-2 * N)
                total -= coef * iv.log(iv.mpf(p))
            mp.prec = prec
            lo = mpf(total.a) - mpf(tail)
            hi = mpf(total.b) + mpf(tail)
            if hi - lo <= mpf(2) ** (-target_bits) * (1 + abs(hi) + abs(lo)):
                return lo, hi
        prec *= 2
    return None


@dataclass(frozen=True)
class HeightValue:
    """An interval [lo, hi] certified to contain a height or pairing value."""

    lo: object  # mpmath mpf
    hi: object

    @property
    def mid(self) -> float:
        return float((self.lo + self.hi) / 2)

    @property
    def value(self) -> float:
        return self.mid

    @property
    def radius(self) -> float:
        return float((self.hi - self.lo) / 2)

    def overlaps(self, other: "HeightValue") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def __repr__(self):
        return f"{self.mid:.15g} ± {self.radius:.3g}"


_ZERO_HEIGHT = HeightValue(mpf(0), mpf(0))


def canonical_height(E: EllipticCurve, P: ECPoint, precision: int = DEFAULT_PRECISION) -> HeightValue:
    """hhat(P) as a certified interval of width at most ~2^-precision.

    Torsion points (exact Mazur-bounded test) return exactly zero.  Raises
    PrecisionExhausted when escalation cannot certify the requested width.
    """
    if P.is_infinity or is_torsion(E, P)[0]:
        return _ZERO_HEIGHT
    dd = duplication_data(E)
    p0, q0 = _reduced_x(dd, P)
    got = _series_interval(dd, p0, q0, precision)
    if got is None:
        raise PrecisionExhausted(f"cannot certify {precision} bits for {P}")
    return HeightValue(*got)


def height_pairing(
    E: EllipticCurve, P: ECPoint, Q: ECPoint, precision: int = DEFAULT_PRECISION
) -> HeightValue:
    """<P, Q> = (hhat(P+Q) - hhat(P) - hhat(Q)) / 2 as a certified interval."""
    hP = canonical_height(E, P, precision)
    hQ = canonical_height(E, Q, precision)
    hS = canonical_height(E, add(E, P, Q), precision)
    mp.prec = precision + 96
    cushion = mpf(2) ** (-(precision + 64))
    lo = (hS.lo - hP.hi - hQ.hi) / 2 - cushion
    hi = (hS.hi - hP.lo - hQ.lo) / 2 + cushion
    return HeightValue(lo, hi)


# ---------------------------------------------------------------------------
# fast float path (proposals only; every proposal is verified exactly)


def height_estimate(E: EllipticCurve, P: ECPoint) -> float:
    return _height_estimate_cached(E, P)


@lru_cache(maxsize=8192)
def _height_estimate_cached(E: EllipticCurve, P: ECPoint) -> float:
    if P.is_infinity or is_torsion(E, P)[0]:
        return 0.0
    dd = duplication_data(E)
    p0, q0 = _reduced_x(dd, P)
    N = 26
    cvals = _gcd_valuation_series(dd, p0, q0, N)
    mp.prec = 90
    a, b = mpf(p0), mpf(q0)
    total = mp.log(max(abs(a), abs(b)))
    logmax = total
    for n in range(N):
        a2 = _mp_form(dd.phi, a, b)
        b2 = _mp_form(dd.psi4, a, b)
        m = max(abs(a2), abs(b2))
        if m == 0:
            break
        logm = mp.log(m)
        total += (logm - 4 * logmax) * mpf(4) ** (-(n + 1))
        shift = int(mp.floor(mp.log(m, 2)))
        sc = mpf(2) ** (-shift)
        a, b = a2 * sc, b2 * sc
        logmax = logm - shift * mp.log(2)
    for p, series in cvals.items():
        s = sum(c * 0.25 ** (n + 1) for n, c in enumerate(series))
        total -= s * mp.log(p)
    return float(total)


def _mp_form(coeffs, A, B):
    deg = len(coeffs) - 1
    acc = mpf(0)
    Ap = [mpf(1)]
    Bp = [mpf(1)]
    for _ in range(deg):
        Ap.append(Ap[-1] * A)
        Bp.append(Bp[-1] * B)
    for i, c in enumerate(coeffs):
        if c:
            acc += c * Ap[i] * Bp[deg - i]
    return acc


def height_limit_estimate(
    E: EllipticCurve, P: ECPoint, doublings: int = 8
) -> tuple[float, float]:
    """Independent oracle: exact x-only duplication, then 4^-m * naive height.

    Returns (value, error_bound).  Pure integer arithmetic, so it shares no
    code path with the interval series; cost grows quickly with ``doublings``.
    """
    if P.is_infinity or is_torsion(E, P)[0]:
        return 0.0, 0.0
    dd = duplication_data(E)
    p, q = _reduced_x(dd, P)
    for _ in range(doublings):
        A = _form_eval_exact(dd.phi, p, q)
        B = _form_eval_exact(dd.psi4, p, q)
        g = math.gcd(A, B)
        p, q = A // g, B // g
    h = math.log(max(abs(p), abs(q)))
    return h / 4**doublings, dd.step_bound / 3 * 4.0 ** (-doublings)


def pairing_estimate(E: EllipticCurve, P: ECPoint, Q: ECPoint) -> float:
    return (
        height_estimate(E, add(E, P, Q)) - height_estimate(E, P) - height_estimate(E, Q)
    ) / 2


# ---------------------------------------------------------------------------
# Mordell-Weil bases and exact-verified decompositions


@dataclass(frozen=True)
class Decomposition:
    """a_1 R_1 + ... + a_r R_r = d Q + T with T torsion, verified exactly."""

    coeffs: tuple[int, ...]
    denom: int
    torsion: ECPoint
    torsion_order: int

    def tensor_coords(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(a, self.denom) for a in self.coeffs)


@dataclass(frozen=True)
class MWBasis:
    """Ordered independent non-torsion points with their Gram matrix.

    Gram entries are float estimates used for proposals; certificates
    recompute rigorous interval pairings where independence matters.
    """

    curve: EllipticCurve
    gens: tuple[ECPoint, ...]
    gram: tuple[tuple[float, ...], ...]

    @property
    def rank(self) -> int:
        return len(self.gens)


def empty_basis(E: EllipticCurve) -> MWBasis:
    return MWBasis(curve=E, gens=(), gram=())


def basis_from_points(E: EllipticCurve, points) -> MWBasis:
    b = empty_basis(E)
    for P in points:
        b = extend_basis(b, P)
    return b


def _relation_offset(E: EllipticCurve, gens, coeffs, d: int, Q: ECPoint):
    """T = sum a_i R_i - d Q if it is torsion, else None."""
    acc = negate(E, scalar_mul(E, d, Q))
    for a, R in zip(coeffs, gens):
        if a:
            acc = add(E, acc, scalar_mul(E, a, R))
    tor, order = is_torsion(E, acc)
    return (acc, order) if tor else None


def decompose(
    basis: MWBasis, Q: ECPoint, denom_bound: int = DEFAULT_DENOM_BOUND
) -> Decomposition | None:
    """Express Q against the basis, exactly verified; None signals "extend".

    Height pairings propose candidate integer vectors for each denominator
    d <= denom_bound; the first candidate reproduced by the exact group law
    (up to a torsion offset of order <= 12) is returned.
    """
    E = basis.curve
    if is_torsion(E, Q)[0]:
        T = negate(E, Q)
        return Decomposition(
            coeffs=(0,) * basis.rank,
            denom=1,
            torsion=T,
            torsion_order=is_torsion(E, T)[1],
        )
    if basis.rank == 0:
        return None
    G = np.array(basis.gram, dtype=float)
    v = np.array([pairing_estimate(E, Q, R) for R in basis.gens], dtype=float)
    try:
        c = np.linalg.solve(G, v)
    except np.linalg.LinAlgError:
        return None
    hQ = height_estimate(E, Q)
    diag = np.diag(G)
    for d in range(1, denom_bound + 1):
        target = d * c
        a = np.rint(target)
        if np.max(np.abs(target - a)) > _PROPOSAL_TOL:
            continue
        if np.max(np.abs(a)) > _COEFF_LIMIT:
            continue
        # exact verification cost scales with the height of the combination;
        # oversized proposals are skipped rather than ground through
        cost = d * d * hQ + float(np.dot(a * a, np.abs(diag)))
        if cost > _VERIFY_BUDGET_NATS:
            continue
        coeffs = tuple(int(x) for x in a)
        if _relation_offset(E, basis.gens, coeffs, d, Q) is None:
            continue
        g = math.gcd(d, *(abs(x) for x in coeffs))
        coeffs = tuple(x // g for x in coeffs)
        d //= g
        T, order = _relation_offset(E, basis.gens, coeffs, d, Q)
        return Decomposition(coeffs=coeffs, denom=d, torsion=T, torsion_order=order)
    return None


def extend_basis(basis: MWBasis, Q: ECPoint) -> MWBasis:
    """Append Q (which failed to decompose) and recompute the Gram matrix.

    Raises DenomBoundTooSmall when the extended Gram matrix fails the
    positive-definiteness check: the new point was dependent after all, so
    the decomposition failure means the denominator bound was too small.
    """
    E = basis.curve
    if is_torsion(E, Q)[0]:
        raise ValueError("cannot extend a basis by a torsion point")
    gens = basis.gens + (Q,)
    n = len(gens)
    gram = [[0.0] * n for _ in range(n)]
    for i in range(n - 1):
        for j in range(n - 1):
            gram[i][j] = basis.gram[i][j]
    for i in range(n - 1):
        gram[i][n - 1] = gram[n - 1][i] = pairing_estimate(E, gens[i], Q)
    gram[n - 1][n - 1] = height_estimate(E, Q)
    M = np.array(gram, dtype=float)
    d = np.sqrt(np.diag(M))
    corr = M / np.outer(d, d)  # unit diagonal; dependence shows as eig ~ 0
    if np.min(np.linalg.eigvalsh(corr)) < 1e-9:
        raise DenomBoundTooSmall(
            "extended Gram matrix is not positive definite; raise the denominator bound"
        )
    return MWBasis(curve=E, gens=gens, gram=tuple(tuple(r) for r in gram))


def certified_gram(E: EllipticCurve, points, precision: int = 64):
    """Interval Gram matrix of height pairings, for certificates."""
    n = len(points)
    out = [[None] * n for _ in range(n)]
    for i in range(n):
        out[i][i] = canonical_height(E, points[i], precision)
        for j in range(i):
            val = height_pairing(E, points[i], points[j], precision)
            out[i][j] = out[j][i] = val
    return out


def gram_is_positive_definite(gram) -> bool:
    """Interval Cholesky; True proves every matrix in the hull is PD.

    A True result certifies that the underlying points are independent in
    E(Q) tensor R, because the true Gram matrix lies inside the hull.
    """
    n = len(gram)
    iv.prec = 256
    G = [[iv.mpf([g.lo, g.hi]) for g in row] for row in gram]
    L = [[iv.mpf(0)] * n for _ in range(n)]
    for j in range(n):
        d = G[j][j]
        for k in range(j):
            d = d - L[j][k] * L[j][k]
        if not (d.a > 0):
            return False
        L[j][j] = iv.sqrt(d)
        for i in range(j + 1, n):
            s = G[i][j]
            for k in range(j):
                s = s - L[i][k] * L[j][k]
            L[i][j] = s / L[j][j]
    return True
