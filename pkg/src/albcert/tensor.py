"""Driver for the tensor-independence search over a pair of elliptic curves.

Given E1, E2 with fully rational 2-torsion, rational points are hunted on
the (up to) six glued genus-2 models; each point P maps to a pair
(phi1(P), phi2(P)), each image is decomposed against an incrementally grown
basis of its curve (the basis is extended, and every cached tensor vector
recomputed, whenever a decomposition fails), and the scaled coefficient
tensor v(P) = (a (x) b)/(d1 d2) is appended exactly when it enlarges the
span.  The final list maps one-to-one onto a linearly independent set of
simple tensors, each of which lands on a torsion zero-cycle class; reaching
r1*r2 of them certifies finiteness, and that decision is certify_pair's.

Linear independence is decided exactly by fraction-free (Bareiss) row
reduction over Z; no float enters any accept/reject decision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

from .curves import ECPoint, EllipticCurve, INFINITY, to_legendre
from .errors import DenomBoundTooSmall
from .heights import (
    DEFAULT_DENOM_BOUND,
    Decomposition,
    MWBasis,
    decompose,
    empty_basis,
    extend_basis,
)
from .hpoints import HPoint, iter_search
from .scholten import RationalMap, ScholtenDatum, six_variants


@dataclass(frozen=True)
class TensorVector:
    """A vector in Q^(r*s); entry (i*s + j) holds a_i * b_j / (d1 * d2)."""

    entries: tuple[Fraction, ...]

    @classmethod
    def from_decompositions(
        cls, d1: Decomposition, d2: Decomposition
    ) -> "TensorVector":
        a = d1.tensor_coords()
        b = d2.tensor_coords()
        return cls(entries=tuple(x * y for x in a for y in b))

    def is_zero(self) -> bool:
        return all(e == 0 for e in self.entries)


def _echelon_insert(rows: list[list[int]], vec: list[Fraction]) -> bool:
    """Try to add vec to an integer echelon basis; True iff independent.

    Rows are kept as primitive integer vectors in echelon order (leading
    index strictly increasing); reduction is fraction-free.
    """
    num = [f.numerator for f in vec]
    den = math.lcm(*(f.denominator for f in vec)) if vec else 1
    cur = [n * (den // f.denominator) for n, f in zip(num, vec)]
    for row in rows:
        lead = next((i for i, v in enumerate(row) if v), None)
        if lead is None or cur[lead] == 0:
            continue
        a, b = row[lead], cur[lead]
        g = math.gcd(a, b)
        ra, rb = a // g, b // g
        cur = [ra * c - rb * r for c, r in zip(cur, row)]
    if all(v == 0 for v in cur):
        return False
    g = 0
    for v in cur:
        g = math.gcd(g, v)
    cur = [v // g for v in cur]
    lead = next(i for i, v in enumerate(cur) if v)
    pos = 0
    for row in rows:
        rl = next((i for i, v in enumerate(row) if v), None)
        if rl is not None and rl < lead:
            pos += 1
    rows.insert(pos, cur)
    return True


def rank_and_membership(T: list[TensorVector], v: TensorVector) -> bool:
    """True iff v lies outside the span of T, decided exactly over Q."""
    if not T:
        return not v.is_zero()
    n = len(T[0].entries)
    if len(v.entries) != n:
        raise ValueError("tensor vectors of mismatched length")
    rows: list[list[int]] = []
    for t in T:
        _echelon_insert(rows, list(t.entries))
    return _echelon_insert(rows, list(v.entries))


def exact_rank(T: list[TensorVector]) -> int:
    rows: list[list[int]] = []
    cnt = 0
    for t in T:
        if _echelon_insert(rows, list(t.entries)):
            cnt += 1
    return cnt


@dataclass(frozen=True)
class LEntry:
    """One accepted point: where it was found and what it decomposed to."""

    point: HPoint
    variant: int
    image1: ECPoint
    image2: ECPoint
    dec1: Decomposition
    dec2: Decomposition


@dataclass
class TensorState:
    """The evolving search state: incremental bases, L, T, coefficient cache."""

    basis1: MWBasis
    basis2: MWBasis
    L: list[LEntry] = field(default_factory=list)
    T: list[TensorVector] = field(default_factory=list)
    # every processed point's decompositions, for recompute-on-extend
    coeff_cache: list[LEntry] = field(default_factory=list)
    echelon: list[list[int]] = field(default_factory=list)
    denom_bound: int = DEFAULT_DENOM_BOUND
    variants: list[ScholtenDatum] = field(default_factory=list)
    points_seen: int = 0
    points_skipped: int = 0

    def check_invariants(self, max_rank: int | None = None) -> None:
        assert len(self.T) == len(self.L)
        assert exact_rank(self.T) == len(self.T)
        if max_rank is not None:
            assert len(self.T) <= max_rank


def _pad(dec: Decomposition, rank: int) -> Decomposition:
    if len(dec.coeffs) == rank:
        return dec
    return replace(dec, coeffs=dec.coeffs + (0,) * (rank - len(dec.coeffs)))


def _decompose_or_extend(
    state: TensorState, which: int, Q: ECPoint
) -> Decomposition:
    basis = state.basis1 if which == 1 else state.basis2
    dec = decompose(basis, Q, state.denom_bound)
    if dec is None:
        basis = extend_basis(basis, Q)
        if which == 1:
            state.basis1 = basis
        else:
            state.basis2 = basis
        dec = Decomposition(
            coeffs=(0,) * (basis.rank - 1) + (1,),
            denom=1,
            torsion=INFINITY,
            torsion_order=1,
        )
        _recompute_tensors(state)
    return dec


def _recompute_tensors(state: TensorState) -> None:
    """Re-derive T from the cached coefficients at the new (r, s).

    Old coefficient vectors are zero-padded at the new slots.  Dropping a
    previously accepted vector is impossible (adding coordinates never
    creates a linear relation), so L is preserved; the echelon cache is
    rebuilt from scratch.
    """
    r, s = state.basis1.rank, state.basis2.rank
    new_T = []
    state.echelon = []
    for i, entry in enumerate(state.L):
        v = TensorVector.from_decompositions(
            _pad(entry.dec1, r), _pad(entry.dec2, s)
        )
        accepted = _echelon_insert(state.echelon, list(v.entries))
        assert accepted, "recompute-on-extend dropped an accepted vector"
        new_T.append(v)
        state.L[i] = replace(entry, dec1=_pad(entry.dec1, r), dec2=_pad(entry.dec2, s))
    state.T = new_T


def process_point(
    state: TensorState, P: HPoint, datum: ScholtenDatum, variant: int
) -> bool:
    """Run one found point through decomposition and the independence test.

    Returns True when the point's tensor vector enlarged the span (and was
    appended to L).  Propagates DenomBoundTooSmall from basis extension.
    """
    img1 = _image(datum.phi1, datum, P)
    img2 = _image(datum.phi2, datum, P)
    if not (state.basis1.curve.contains(img1) and state.basis2.curve.contains(img2)):
        raise AssertionError("covering map image off-curve; derivation bug")
    dec1 = _decompose_or_extend(state, 1, img1)
    dec2 = _decompose_or_extend(state, 2, img2)
    entry = LEntry(
        point=P, variant=variant, image1=img1, image2=img2,
        dec1=_pad(dec1, state.basis1.rank), dec2=_pad(dec2, state.basis2.rank),
    )
    state.coeff_cache.append(entry)
    v = TensorVector.from_decompositions(entry.dec1, entry.dec2)
    if not _echelon_insert(state.echelon, list(v.entries)):
        return False
    state.T.append(v)
    state.L.append(entry)
    return True


def _image(phi: RationalMap, datum: ScholtenDatum, P: HPoint) -> ECPoint:
    if P.at_infinity:
        return phi.apply_infinity(P.slope)
    return phi.apply(P.x, P.y)


@dataclass(frozen=True)
class RunOptions:
    bound: int = 10**4
    denom_bound: int = DEFAULT_DENOM_BOUND
    variants: int = 6  # cap on how many glued models to use
    target: int | None = None  # stop once |L| reaches this (e.g. r1*r2)
    self_check: bool = False  # re-verify invariants after every append


def run(
    E1: EllipticCurve, E2: EllipticCurve, options: RunOptions = RunOptions()
) -> TensorState:
    """Full pipeline for one pair: variants, search, decompose, tensor test.

    Curves must have fully rational 2-torsion (NotFullTwoTorsion otherwise).
    Points are processed variant by variant in the deterministic search
    order, so replays are reproducible; an optional target stops the scan
    early once enough independent tensors exist.
    """
    data = prepare_variants(E1, E2, options.variants)
    state = TensorState(
        basis1=empty_basis(E1),
        basis2=empty_basis(E2),
        denom_bound=options.denom_bound,
        variants=data,
    )
    for variant, datum in enumerate(data):
        for P in iter_search(datum.curve, options.bound):
            state.points_seen += 1
            try:
                process_point(state, P, datum, variant)
            except DenomBoundTooSmall:
                # a point whose image decomposes only with oversized
                # coefficients adds nothing worth its cost; skip it
                state.points_skipped += 1
                continue
            if options.self_check:
                state.check_invariants(options.target)
            if options.target is not None and len(state.L) >= options.target:
                return state
    return state


def prepare_variants(
    E1: EllipticCurve, E2: EllipticCurve, max_variants: int = 6
) -> list[ScholtenDatum]:
    """Glued models for the pair, maps re-based onto the caller's curves."""
    lp1 = to_legendre(E1)
    lp2 = to_legendre(E2)
    data = six_variants(lp1.alpha, lp1.beta, lp2.alpha, lp2.beta)[:max_variants]
    rebased = []
    for d in data:
        phi1 = d.phi1.composed_with(lp1, E1)
        phi2 = d.phi2.composed_with(lp2, E2)
        if not (phi1.is_morphism(d.curve) and phi2.is_morphism(d.curve)):
            raise AssertionError("re-based covering map fails the morphism check")
        rebased.append(
            ScholtenDatum(params=d.params, curve=d.curve, phi1=phi1, phi2=phi2)
        )
    return rebased


# ---------------------------------------------------------------------------
# certification of a pair run

from .certmodel import (  # noqa: E402  (kept near their use)
    Certificate,
    Undecided,
    enc_curve,
    enc_fraction,
    enc_point,
    enc_poly,
    render_cycle,
)
from .heights import certified_gram, gram_is_positive_definite  # noqa: E402



def _enc_hpoint(P: HPoint):
    if P.at_infinity:
        return {"infinity": None if P.slope is None else enc_fraction(P.slope)}
    return {"x": enc_fraction(P.x), "y": enc_fraction(P.y)}


def _enc_rf(rf):
    return {"num": enc_poly(rf.num), "den": enc_poly(rf.den)}


def _enc_map(phi):
    return {"u": _enc_rf(phi.u), "v": _enc_rf(phi.v), "w": _enc_rf(phi.w)}


def _enc_dec(dec: Decomposition):
    return {
        "coeffs": list(dec.coeffs),
        "denom": dec.denom,
        "torsion": enc_point(dec.torsion),
        "torsion_order": dec.torsion_order,
    }


def _interval_str(hv):
    return {"lo": repr(float(hv.lo)), "hi": repr(float(hv.hi))}


def _certified_pd_gram(E, points, label: str, precision: int = 128):
    """Interval Gram certified positive definite, escalating precision."""
    for prec in (precision, 2 * precision, 4 * precision):
        gram = certified_gram(E, points, prec)
        if gram_is_positive_definite(gram):
            return gram, prec
    raise DenomBoundTooSmall(
        f"cannot certify independence of the {label} basis; "
        "a decomposition was likely missed (raise --denom-bound)"
    )


def certify_pair(
    E1: EllipticCurve,
    E2: EllipticCurve,
    state: TensorState,
    ranks: tuple[int, int],
    provenance: dict | None = None,
    labels: tuple[str | None, str | None] = (None, None),
    precision: int = 128,
) -> Certificate | Undecided:
    """Decide the finiteness claim from a finished run.

    Emits a rank0 certificate if either ingested rank is zero, an algfinite
    certificate if the run produced r1*r2 independent tensors, and an
    Undecided record (with the deficit) otherwise.
    """
    r1, r2 = ranks
    provenance = dict(provenance or {})
    subjects = [enc_curve(E1, labels[0]), enc_curve(E2, labels[1])]
    if r1 == 0 or r2 == 0:
        which = 0 if r1 == 0 else 1
        return Certificate(
            rule="rank0",
            subjects=subjects,
            witnesses={"rank_zero_factor": which, "ranks": [r1, r2]},
            transcript=[
                {"check": "curve_nonsingular", "subject": 0},
                {"check": "curve_nonsingular", "subject": 1},
                {
                    "check": "rank_data",
                    "subject": which,
                    "rank": 0,
                    "source": provenance.get("rank_source", "user"),
                },
            ],
            provenance=provenance,
        )

    if state.basis1.rank > r1 or state.basis2.rank > r2:
        # more independent points than the ingested rank allows: either the
        # rank data is wrong or a decomposition was missed (denominator
        # bound); never certify on top of that
        return Undecided(
            reason="incremental_rank_exceeds_ingested_rank",
            details={
                "basis_ranks": [state.basis1.rank, state.basis2.rank],
                "ingested_ranks": [r1, r2],
            },
        )
    if len(state.L) != r1 * r2:
        return Undecided(
            reason="insufficient_independent_tensors",
            details={"found": len(state.L), "needed": r1 * r2},
        )
    # |L| = r1*r2 forces the incremental bases to be full rank
    assert state.basis1.rank == r1 and state.basis2.rank == r2

    gram1, prec1 = _certified_pd_gram(E1, state.basis1.gens, "first", precision)
    gram2, prec2 = _certified_pd_gram(E2, state.basis2.gens, "second", precision)
    prec = max(prec1, prec2)

    entries = []
    cycles = []
    for e in state.L:
        v = TensorVector.from_decompositions(e.dec1, e.dec2)
        entries.append(
            {
                "point": _enc_hpoint(e.point),
                "variant": e.variant,
                "image1": enc_point(e.image1),
                "image2": enc_point(e.image2),
                "dec1": _enc_dec(e.dec1),
                "dec2": _enc_dec(e.dec2),
                "tensor": [enc_fraction(c) for c in v.entries],
            }
        )
        cyc = render_cycle(
            f"{e.image1}", f"{e.image2}", "O1", "O2"
        )
        cycles.append(repr(cyc))

    variants = [
        {
            "params": [enc_fraction(v) for v in d.params],
            "lead": enc_fraction(d.curve.lead),
            "poly": enc_poly(d.curve.poly),
            "phi1": _enc_map(d.phi1),
            "phi2": _enc_map(d.phi2),
        }
        for d in state.variants
    ]

    witnesses = {
        "ranks": [r1, r2],
        "variants": variants,
        "basis1": [enc_point(P) for P in state.basis1.gens],
        "basis2": [enc_point(P) for P in state.basis2.gens],
        "gram_precision": prec,
        "gram1": [[_interval_str(h) for h in row] for row in gram1],
        "gram2": [[_interval_str(h) for h in row] for row in gram2],
        "entries": entries,
        "cycles": cycles,
    }
    transcript = [
        {"check": "curve_nonsingular", "subject": 0},
        {"check": "curve_nonsingular", "subject": 1},
        {"check": "full_two_torsion", "subject": 0},
        {"check": "full_two_torsion", "subject": 1},
        {
            "check": "mazur_note",
            "note": "torsion tests are exhaustive for orders up to 12 over Q",
        },
    ]
    for i in range(len(variants)):
        transcript.append({"check": "variant_model", "variant": i})
        transcript.append({"check": "variant_maps", "variant": i})
    for k in range(len(entries)):
        transcript.append({"check": "entry_point_on_curve", "entry": k})
        transcript.append({"check": "entry_images", "entry": k})
        transcript.append({"check": "entry_decomposition", "entry": k, "side": 1})
        transcript.append({"check": "entry_decomposition", "entry": k, "side": 2})
        transcript.append({"check": "entry_tensor", "entry": k})
    transcript += [
        {"check": "tensor_independence"},
        {"check": "basis_gram_positive_definite", "side": 1, "precision": prec},
        {"check": "basis_gram_positive_definite", "side": 2, "precision": prec},
        {"check": "cycles_degree_zero"},
        {
            "check": "count_equals_rank_product",
            "source": provenance.get("rank_source", "user"),
        },
    ]
    return Certificate(
        rule="algfinite",
        subjects=subjects,
        witnesses=witnesses,
        transcript=transcript,
        provenance=provenance,
    )


def run_and_certify(
    E1: EllipticCurve,
    E2: EllipticCurve,
    ranks: tuple[int, int],
    options: RunOptions = RunOptions(),
    provenance: dict | None = None,
    labels: tuple[str | None, str | None] = (None, None),
    precision: int = 128,
    return_state: bool = False,
):
    """Run the pipeline with early stop at r1*r2 and certify the outcome."""
    r1, r2 = ranks
    if r1 == 0 or r2 == 0:
        state = TensorState(empty_basis(E1), empty_basis(E2))
        result = certify_pair(E1, E2, state, ranks, provenance, labels, precision)
        return (result, state) if return_state else result
    opts = replace(options, target=r1 * r2)
    state = run(E1, E2, opts)
    result = certify_pair(E1, E2, state, ranks, provenance, labels, precision)
    return (result, state) if return_state else result
