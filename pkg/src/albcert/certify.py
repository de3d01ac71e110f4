"""Certification rules beyond the pair pipeline, plus the transcript verifier.

Rules here either consume ingested data directly (rank-0 factors, declared
isogeny classes), instantiate the two-parameter curve family with its
built-in section, wrap literature results as fixtures, or combine pairwise
certificates into a product certificate.  `verify_certificate` re-executes
every transcript assertion of any certificate this package emits, using
exact arithmetic; rules that additionally depend on cited literature or on
ingested rank data say so in `external_dependencies`.
"""

from __future__ import annotations

from fractions import Fraction

from .certmodel import (
    Certificate,
    MACHINE_RULES,
    Undecided,
    dec_curve,
    dec_fraction,
    dec_point,
    dec_poly,
    enc_curve,
    enc_fraction,
    enc_point,
    enc_poly,
    render_cycle,
)
from .curves import ECPoint, EllipticCurve, add, is_torsion, scalar_mul, two_torsion
from .errors import (
    MissingPairCertificate,
    MissingRationalPoint,
    SingularCurve,
    VerificationError,
)
from .genus2 import (
    Genus2Curve,
    MumfordDivisor,
    OddModel,
    divisor_from_points,
    jacobian_order_mod_p,
    odd_model,
)
from .polys import QQ, pnorm

# ---------------------------------------------------------------------------
# the two-parameter family with a built-in section


def est_curve(s, t) -> tuple[EllipticCurve, ECPoint]:
    """The family member y^2 = x^3 - 3t^2 x + 2t^3 + (1-s-3t)^2 s and its
    marked point (1-s-2t, 1-s-3t), verified on-curve exactly.

    Raises SingularCurve when the discriminant vanishes.
    """
    s, t = Fraction(s), Fraction(t)
    a6 = 2 * t**3 + (1 - s - 3 * t) ** 2 * s
    E = EllipticCurve(0, 0, 0, -3 * t * t, a6)  # SingularCurve if disc = 0
    P = ECPoint(1 - s - 2 * t, 1 - s - 3 * t)
    assert E.contains(P), "family identity violated; construction bug"
    return E, P


def certify_est_pair(s, t1, t2, ranks: tuple[int, int], provenance=None):
    """Finiteness for a same-s pair of family members of rank 1.

    The computable hypotheses (nonsingular members, marked points exactly on
    curve and non-torsion) are checked here; rank-1 inputs are data.
    """
    s = Fraction(s)
    E1, P1 = est_curve(s, t1)
    E2, P2 = est_curve(s, t2)
    provenance = dict(provenance or {})
    if ranks != (1, 1):
        return Undecided(reason="est_family_needs_rank_one", details={"ranks": list(ranks)})
    for which, (E, P, t) in enumerate(((E1, P1, t1), (E2, P2, t2))):
        if is_torsion(E, P)[0]:
            return Undecided(
                reason="marked_point_torsion",
                details={"which": which, "t": str(Fraction(t))},
            )
    witnesses = {
        "s": enc_fraction(s),
        "t": [enc_fraction(t1), enc_fraction(t2)],
        "points": [enc_point(P1), enc_point(P2)],
        "ranks": [1, 1],
    }
    transcript = []
    for which in (0, 1):
        transcript += [
            {"check": "est_model", "which": which},
            {"check": "est_point", "which": which},
            {"check": "est_nontorsion", "which": which},
            {
                "check": "rank_data",
                "subject": which,
                "rank": 1,
                "source": provenance.get("rank_source", "user"),
            },
        ]
    return Certificate(
        rule="est_family",
        subjects=[enc_curve(E1), enc_curve(E2)],
        witnesses=witnesses,
        transcript=transcript,
        provenance=dict(
            provenance,
            external_dependencies=[
                "rank data",
                "rational-curve-in-Kummer-surface construction for the family",
            ],
        ),
    )


# ---------------------------------------------------------------------------
# isogenous rank-1 pairs (isogeny classes are ingested data)


def certify_isogenous_rank1(E1, E2, isogeny_data: dict, labels=(None, None)):
    """Finiteness when E2 is isogenous to E1 and the rank is 1.

    ``isogeny_data`` carries {class1, class2, rank, rank_source} from ingest;
    isogeny membership is consumed as data, never computed here.
    """
    cls1, cls2 = isogeny_data.get("class1"), isogeny_data.get("class2")
    rank = isogeny_data.get("rank")
    if cls1 is None or cls2 is None or cls1 != cls2:
        return Undecided(
            reason="different_isogeny_classes", details={"class1": cls1, "class2": cls2}
        )
    if rank != 1:
        return Undecided(reason="isogenous_rule_needs_rank_one", details={"rank": rank})
    witnesses = {
        "isogeny_class": cls1,
        "rank": 1,
    }
    transcript = [
        {"check": "curve_nonsingular", "subject": 0},
        {"check": "curve_nonsingular", "subject": 1},
        {"check": "isogeny_class_match"},
        {
            "check": "rank_data",
            "subject": 0,
            "rank": 1,
            "source": isogeny_data.get("rank_source", "user"),
        },
    ]
    gen = isogeny_data.get("generator")
    if gen is not None:
        witnesses["generator"] = enc_point(gen)
        transcript.append({"check": "generator_nontorsion", "subject": 0})
    return Certificate(
        rule="isogenous_rank1",
        subjects=[enc_curve(E1, labels[0]), enc_curve(E2, labels[1])],
        witnesses=witnesses,
        transcript=transcript,
        provenance={
            "external_dependencies": ["rank data", "isogeny class data"],
            "rank_source": isogeny_data.get("rank_source", "user"),
        },
    )


# ---------------------------------------------------------------------------
# products of d curves


def combine_product(
    pairwise: list[Certificate], curves: list[str], rational_point_flags: dict
) -> Certificate:
    """Combine pairwise certificates into one for the d-fold product.

    Every factor must declare a rational point and every unordered pair of
    factor labels (including self-pairs when a factor repeats) must be
    covered by one of the pairwise certificates.  The pairwise certificates
    are embedded, so the product certificate verifies recursively.
    """
    for label in curves:
        if not rational_point_flags.get(label):
            raise MissingRationalPoint(f"factor {label} has no declared rational point")
    by_pair = {}
    for cert in pairwise:
        key = frozenset(_subject_labels(cert))
        by_pair[key] = cert
    needed = set()
    n = len(curves)
    for i in range(n):
        for j in range(i + 1, n):
            needed.add(frozenset((curves[i], curves[j])))
    for key in sorted(needed, key=sorted):
        if key not in by_pair:
            raise MissingPairCertificate(f"missing certificate for pair {sorted(key)}")
    used = [by_pair[key] for key in sorted(needed, key=sorted)]
    witnesses = {
        "factors": list(curves),
        "rational_points": {k: str(v) for k, v in rational_point_flags.items()},
        "pairs": [
            {
                "labels": sorted(_subject_labels(cert)),
                "digest": cert.digest(),
                "certificate": cert.payload(),
            }
            for cert in used
        ],
    }
    transcript = [{"check": "pair_coverage"}]
    for i in range(len(curves)):
        transcript.append({"check": "factor_rational_point", "factor": i})
    for k in range(len(used)):
        transcript.append({"check": "subcertificate", "pair": k})
    return Certificate(
        rule="product_combine",
        subjects=[{"label": c} for c in curves],
        witnesses=witnesses,
        transcript=transcript,
        provenance={"external_dependencies": ["inherited from the embedded pair certificates"]},
    )


def _subject_labels(cert: Certificate) -> list[str]:
    out = []
    for idx, s in enumerate(cert.subjects):
        out.append(s.get("label") or f"subject{idx}:{s.get('a_invariants')}")
    return out


# ---------------------------------------------------------------------------
# literature fixtures


_FIXTURE_PAIRS = [
    {
        "name": "conductor-37 modular pair",
        "curves": [
            {"label": "37.a", "a_invariants": ["0", "0", "1", "-1", "0"]},
            {"label": "37.b", "a_invariants": ["0", "1", "1", "-23", "-50"]},
        ],
        "method": "modular parametrizations through a common quotient curve",
    },
    {
        "name": "conductor-91 modular pair",
        "curves": [
            {"label": "91.a", "a_invariants": ["0", "0", "1", "1", "0"]},
            {"label": "91.b", "a_invariants": ["0", "1", "1", "-7", "5"]},
        ],
        "method": "modular parametrizations through a common quotient curve",
    },
] + [
    {
        "name": f"bielliptic pair {a}-{b}",
        "curves": [{"label": a}, {"label": b}],
        "method": "Weil reciprocity on a bielliptic curve",
    }
    for a, b in [
        ("37a1", "43a1"),
        ("37a1", "57a1"),
        ("37a1", "77a1"),
        ("53a1", "58a1"),
        ("61a1", "65a1"),
        ("61a1", "65a2"),
        ("65a2", "79a1"),
        ("37a1", "53a1"),
    ]
]


def fixture_pairs() -> list[Certificate]:
    """Literature-backed pairs shipped as certificates of rule "fixture".

    Where the source displays explicit models they are included and checked
    to be nonsingular; label-only pairs carry the citation alone.
    """
    out = []
    for fx in _FIXTURE_PAIRS:
        transcript = [{"check": "citation_present"}]
        if all("a_invariants" in c for c in fx["curves"]):
            transcript.append({"check": "fixture_models"})
        out.append(
            Certificate(
                rule="fixture",
                subjects=fx["curves"],
                witnesses={"name": fx["name"]},
                transcript=transcript,
                provenance={
                    "external_dependencies": ["literature"],
                    "method": fx["method"],
                },
            )
        )
    return out


# ---------------------------------------------------------------------------
# the verifier


def _vfail(msg: str):
    raise VerificationError(msg)


def _subject_curve(cert, idx) -> EllipticCurve:
    try:
        return dec_curve(cert.subjects[idx])
    except SingularCurve:
        _vfail(f"subject {idx} is singular")


def _check_curve_nonsingular(cert, params):
    _subject_curve(cert, params["subject"])


def _check_full_two_torsion(cert, params):
    E = _subject_curve(cert, params["subject"])
    if len(two_torsion(E)) != 4:
        _vfail(f"subject {params['subject']} lacks full rational 2-torsion")


def _check_mazur_note(cert, params):
    pass  # informational record only


def _variant(cert, i):
    from .scholten import HyperCurve, RF, RationalMap

    v = cert.witnesses["variants"][i]
    H = HyperCurve(lead=dec_fraction(v["lead"]), poly=tuple(dec_poly(v["poly"])))

    def dec_map(m, target):
        return RationalMap(
            u=RF(dec_poly(m["u"]["num"]), dec_poly(m["u"]["den"])),
            v=RF(dec_poly(m["v"]["num"]), dec_poly(m["v"]["den"])),
            w=RF(dec_poly(m["w"]["num"]), dec_poly(m["w"]["den"])),
            target=target,
        )

    E1 = _subject_curve(cert, 0)
    E2 = _subject_curve(cert, 1)
    return H, dec_map(v["phi1"], E1), dec_map(v["phi2"], E2)


def _check_variant_model(cert, params):
    from .scholten import build_curve

    i = params["variant"]
    v = cert.witnesses["variants"][i]
    a, b, c, d = (dec_fraction(x) for x in v["params"])
    H = build_curve(a, b, c, d)
    if enc_fraction(H.lead) != v["lead"] or enc_poly(H.poly) != v["poly"]:
        _vfail(f"variant {i} model does not match its parameters")


def _check_variant_maps(cert, params):
    i = params["variant"]
    H, phi1, phi2 = _variant(cert, i)
    for which, phi in ((1, phi1), (2, phi2)):
        if phi.v.is_zero():
            # a vanishing odd part would allow constant "maps", which carry
            # no torsion relation at all; v != 0 plus the two identities
            # forces anti-equivariance, hence Weierstrass points land on
            # 2-torsion and the covering is a genuine degree-2 morphism
            _vfail(f"variant {i} map {which} has identically zero odd part")
        if not phi.is_morphism(H):
            _vfail(f"variant {i} map {which} fails the symbolic morphism identity")


def _entry_point(entry):
    from .hpoints import HPoint

    p = entry["point"]
    if "infinity" in p:
        slope = p["infinity"]
        return HPoint.infinity(None if slope is None else dec_fraction(slope))
    return HPoint.affine(dec_fraction(p["x"]), dec_fraction(p["y"]))


def _check_entry_point_on_curve(cert, params):
    k = params["entry"]
    entry = cert.witnesses["entries"][k]
    H, _, _ = _variant(cert, entry["variant"])
    P = _entry_point(entry)
    if P.at_infinity:
        if H.degree == 5:
            if P.slope is not None:
                _vfail(f"entry {k}: quintic infinite point carries a slope")
        else:
            s = H.infinite_branch_slope()
            if s is None or P.slope not in (s, -s):
                _vfail(f"entry {k}: infinite point has the wrong branch slope")
    elif not H.contains(P.x, P.y):
        _vfail(f"entry {k}: point not on its variant curve")


def _check_entry_images(cert, params):
    k = params["entry"]
    entry = cert.witnesses["entries"][k]
    H, phi1, phi2 = _variant(cert, entry["variant"])
    P = _entry_point(entry)
    if P.at_infinity:
        img1, img2 = phi1.apply_infinity(P.slope), phi2.apply_infinity(P.slope)
    else:
        img1, img2 = phi1.apply(P.x, P.y), phi2.apply(P.x, P.y)
    if img1 != dec_point(entry["image1"]) or img2 != dec_point(entry["image2"]):
        _vfail(f"entry {k}: stored images disagree with the maps")
    if not (phi1.target.contains(img1) and phi2.target.contains(img2)):
        _vfail(f"entry {k}: image off its curve")


def _check_entry_decomposition(cert, params):
    k, side = params["entry"], params["side"]
    entry = cert.witnesses["entries"][k]
    E = _subject_curve(cert, side - 1)
    gens = [dec_point(p) for p in cert.witnesses[f"basis{side}"]]
    dec = entry[f"dec{side}"]
    Q = dec_point(entry[f"image{side}"])
    acc = scalar_mul(E, -dec["denom"], Q)
    for a, R in zip(dec["coeffs"], gens):
        acc = add(E, acc, scalar_mul(E, a, R))
    T = dec_point(dec["torsion"])
    if acc != T:
        _vfail(f"entry {k} side {side}: relation fails the exact group law")
    tor, order = is_torsion(E, T)
    if not tor or order != dec["torsion_order"]:
        _vfail(f"entry {k} side {side}: torsion offset order mismatch")


def _check_entry_tensor(cert, params):
    k = params["entry"]
    entry = cert.witnesses["entries"][k]
    d1, d2 = entry["dec1"], entry["dec2"]
    a = [Fraction(x, d1["denom"]) for x in d1["coeffs"]]
    b = [Fraction(x, d2["denom"]) for x in d2["coeffs"]]
    want = [x * y for x in a for y in b]
    got = [dec_fraction(s) for s in entry["tensor"]]
    if want != got:
        _vfail(f"entry {k}: tensor vector does not match the decompositions")


def _check_tensor_independence(cert, params):
    from .tensor import TensorVector, exact_rank

    vecs = [
        TensorVector(entries=tuple(dec_fraction(s) for s in e["tensor"]))
        for e in cert.witnesses["entries"]
    ]
    if exact_rank(vecs) != len(vecs):
        _vfail("tensor vectors are linearly dependent")


def _check_basis_gram_pd(cert, params):
    from .heights import certified_gram, gram_is_positive_definite

    side = params["side"]
    E = _subject_curve(cert, side - 1)
    gens = [dec_point(p) for p in cert.witnesses[f"basis{side}"]]
    gram = certified_gram(E, gens, params["precision"])
    if not gram_is_positive_definite(gram):
        _vfail(f"basis {side}: interval Gram matrix not certifiably positive definite")


def _check_count_equals_rank_product(cert, params):
    r1, r2 = cert.witnesses["ranks"]
    if len(cert.witnesses["entries"]) != r1 * r2:
        _vfail("tensor count does not reach the rank product")
    if len(cert.witnesses["basis1"]) != r1 or len(cert.witnesses["basis2"]) != r2:
        _vfail("basis sizes disagree with the stated ranks")


def _check_rank_data(cert, params):
    if params["rank"] < 0:
        _vfail("negative rank in data")
    ranks = cert.witnesses.get("ranks")
    if ranks is not None and ranks[params.get("subject", 0)] != params["rank"]:
        _vfail("transcript rank disagrees with witness ranks")


def _check_cycles_degree_zero(cert, params):
    entries = cert.witnesses["entries"]
    cycles = cert.witnesses.get("cycles", [])
    if len(cycles) != len(entries):
        _vfail("cycle list length mismatch")
    for e in entries:
        cyc = render_cycle(
            str(dec_point(e["image1"])), str(dec_point(e["image2"])), "O1", "O2"
        )
        if cyc.degree() != 0:
            _vfail("rendered zero-cycle has nonzero degree")


def _check_generator_nontorsion(cert, params):
    E = _subject_curve(cert, params.get("subject", 0))
    P = dec_point(cert.witnesses["generator"])
    if not E.contains(P):
        _vfail("declared generator is off-curve")
    if is_torsion(E, P)[0]:
        _vfail("declared generator is torsion")


def _check_isogeny_class_match(cert, params):
    if not cert.witnesses.get("isogeny_class"):
        _vfail("no isogeny class recorded")


def _est_member(cert, which):
    s = dec_fraction(cert.witnesses["s"])
    t = dec_fraction(cert.witnesses["t"][which])
    return est_curve(s, t)


def _check_est_model(cert, params):
    E, _ = _est_member(cert, params["which"])
    if enc_curve(E)["a_invariants"] != cert.subjects[params["which"]]["a_invariants"]:
        _vfail("subject curve is not the stated family member")


def _check_est_point(cert, params):
    E, P = _est_member(cert, params["which"])
    stored = dec_point(cert.witnesses["points"][params["which"]])
    if stored != P or not E.contains(P):
        _vfail("marked family point mismatch")


def _check_est_nontorsion(cert, params):
    E, P = _est_member(cert, params["which"])
    if is_torsion(E, P)[0]:
        _vfail("marked family point is torsion")


def _check_pair_coverage(cert, params):
    labels = [s["label"] for s in cert.subjects]
    have = {frozenset(p["labels"]) for p in cert.witnesses["pairs"]}
    for i in range(len(labels)):
        for j in range(i + 1, len(labels)):
            if frozenset((labels[i], labels[j])) not in have:
                _vfail(f"pair ({labels[i]}, {labels[j]}) not covered")


def _check_factor_rational_point(cert, params):
    label = cert.subjects[params["factor"]]["label"]
    if not cert.witnesses["rational_points"].get(label):
        _vfail(f"factor {label} lacks a declared rational point")


def _check_subcertificate(cert, params):
    sub = cert.witnesses["pairs"][params["pair"]]
    inner = Certificate(
        rule=sub["certificate"]["rule"],
        subjects=sub["certificate"]["subjects"],
        witnesses=sub["certificate"]["witnesses"],
        transcript=sub["certificate"]["transcript"],
        provenance=sub["certificate"]["provenance"],
        version=sub["certificate"].get("version", "1"),
    )
    if inner.digest() != sub["digest"]:
        _vfail(f"embedded pair certificate {params['pair']} digest mismatch")
    verify_certificate(inner)


def _check_citation_present(cert, params):
    if not cert.provenance.get("method"):
        _vfail("fixture certificate without a citation method")


def _check_fixture_models(cert, params):
    for idx, s in enumerate(cert.subjects):
        if "a_invariants" in s:
            _subject_curve(cert, idx)


# genus-2 self-product checks


def _g2_curve(cert) -> Genus2Curve:
    return Genus2Curve(poly=tuple(dec_poly(cert.witnesses["f"])))


def _g2_model(cert) -> OddModel:
    m = cert.witnesses["odd_model"]
    return OddModel(
        g=tuple(dec_poly(m["g"])),
        root=None if m["root"] is None else dec_fraction(m["root"]),
        a5=dec_fraction(m["a5"]),
    )


def _g2_divisor(cert) -> MumfordDivisor:
    d = cert.witnesses["divisor"]
    return MumfordDivisor(
        u=tuple(dec_poly(d["u"])), v=tuple(dec_poly(d["v"])), field="Q"
    )


def _check_genus2_model(cert, params):
    _g2_curve(cert)  # constructor enforces degree and squarefreeness


def _check_weierstrass_root(cert, params):
    C = _g2_curve(cert)
    w = cert.witnesses["weierstrass"]
    if w is None:
        if len(pnorm(C.f())) - 1 != 5:
            _vfail("infinite Weierstrass point requires a degree-5 model")
        return
    from .polys import peval

    if peval(C.f(), dec_fraction(w)) != 0:
        _vfail("declared Weierstrass abscissa is not a root")


def _check_genus2_point(cert, params):
    C = _g2_curve(cert)
    p = cert.witnesses["point"]
    if "infinity" in p:
        f = C.f()
        if len(f) - 1 != 6:
            _vfail("infinite non-Weierstrass point needs a degree-6 model")
        from .intarith import sqrt_fraction

        s = sqrt_fraction(f[6])
        if s is None or dec_fraction(p["infinity"]) not in (s, -s):
            _vfail("stated branch slope is wrong")
    elif not C.contains(dec_fraction(p["x"]), dec_fraction(p["y"])):
        _vfail("witness point is not on the curve")


def _check_odd_model_consistent(cert, params):
    C = _g2_curve(cert)
    m = cert.witnesses["odd_model"]
    root = None if m["root"] is None else dec_fraction(m["root"])
    rebuilt = odd_model(C, root)
    if enc_poly(rebuilt.g) != m["g"] or rebuilt.a5 != dec_fraction(m["a5"]):
        _vfail("odd model does not match the curve")


def _check_divisor_matches(cert, params):
    C = _g2_curve(cert)
    model = _g2_model(cert)
    p = cert.witnesses["point"]
    if "infinity" in p:
        P = ("infinity", dec_fraction(p["infinity"]))
    else:
        P = (dec_fraction(p["x"]), dec_fraction(p["y"]))
    w = cert.witnesses["weierstrass"]
    W = None if w is None else dec_fraction(w)
    D = divisor_from_points(C, model, P, W)
    stored = _g2_divisor(cert)
    if (pnorm(list(D.u)), pnorm(list(D.v))) != (
        pnorm(list(stored.u)),
        pnorm(list(stored.v)),
    ):
        _vfail("stored divisor disagrees with [P] - [W]")


def _check_jacobian_order(cert, params):
    C = _g2_curve(cert)
    p = params["prime"]
    want = cert.witnesses["orders"][str(p)]
    if jacobian_order_mod_p(C, p) != want:
        _vfail(f"#J(F_{p}) mismatch")


def _check_torsion_bound(cert, params):
    import math

    orders = [v for v in cert.witnesses["orders"].values()]
    B = 0
    for v in orders:
        B = v if B == 0 else math.gcd(B, v)
    if B != cert.witnesses["torsion_bound"]:
        _vfail("gcd of group orders disagrees with the stated bound")


def _check_multiple_nonzero(cert, params):
    model = _g2_model(cert)
    J = model.jacobian(QQ)
    D = _g2_divisor(cert)
    if J.mul(params["n"], D).is_identity():
        _vfail(f"{params['n']} * D vanishes; class is torsion")


_CHECKS = {
    "curve_nonsingular": _check_curve_nonsingular,
    "full_two_torsion": _check_full_two_torsion,
    "mazur_note": _check_mazur_note,
    "variant_model": _check_variant_model,
    "variant_maps": _check_variant_maps,
    "entry_point_on_curve": _check_entry_point_on_curve,
    "entry_images": _check_entry_images,
    "entry_decomposition": _check_entry_decomposition,
    "entry_tensor": _check_entry_tensor,
    "tensor_independence": _check_tensor_independence,
    "basis_gram_positive_definite": _check_basis_gram_pd,
    "count_equals_rank_product": _check_count_equals_rank_product,
    "rank_data": _check_rank_data,
    "cycles_degree_zero": _check_cycles_degree_zero,
    "generator_nontorsion": _check_generator_nontorsion,
    "isogeny_class_match": _check_isogeny_class_match,
    "est_model": _check_est_model,
    "est_point": _check_est_point,
    "est_nontorsion": _check_est_nontorsion,
    "pair_coverage": _check_pair_coverage,
    "factor_rational_point": _check_factor_rational_point,
    "subcertificate": _check_subcertificate,
    "citation_present": _check_citation_present,
    "fixture_models": _check_fixture_models,
    "genus2_model": _check_genus2_model,
    "weierstrass_root": _check_weierstrass_root,
    "genus2_point": _check_genus2_point,
    "odd_model_consistent": _check_odd_model_consistent,
    "divisor_matches": _check_divisor_matches,
    "jacobian_order": _check_jacobian_order,
    "torsion_bound": _check_torsion_bound,
    "multiple_nonzero": _check_multiple_nonzero,
}


def _required_steps(cert: Certificate) -> list[dict]:
    """The checks a certificate's witnesses *oblige* it to carry.

    The transcript is written by the prover; trusting its coverage would let
    a forger silently drop load-bearing assertions (an untested divisor
    multiple, a decomposition).  The verifier therefore derives the
    obligations from the rule and the witnesses and demands each one appear
    in the transcript before executing anything.
    """
    w = cert.witnesses
    rule = cert.rule
    req: list[dict] = []
    if rule == "algfinite":
        for s in (0, 1):
            req.append({"check": "curve_nonsingular", "subject": s})
            req.append({"check": "full_two_torsion", "subject": s})
        for i in range(len(w["variants"])):
            req.append({"check": "variant_model", "variant": i})
            req.append({"check": "variant_maps", "variant": i})
        for k in range(len(w["entries"])):
            req.append({"check": "entry_point_on_curve", "entry": k})
            req.append({"check": "entry_images", "entry": k})
            req.append({"check": "entry_decomposition", "entry": k, "side": 1})
            req.append({"check": "entry_decomposition", "entry": k, "side": 2})
            req.append({"check": "entry_tensor", "entry": k})
        req.append({"check": "tensor_independence"})
        req.append({"check": "basis_gram_positive_definite", "side": 1})
        req.append({"check": "basis_gram_positive_definite", "side": 2})
        req.append({"check": "count_equals_rank_product"})
    elif rule == "rank0":
        if "f" in w:  # genus-2 self-product subject
            req.append({"check": "genus2_model"})
        else:
            for s in range(len(cert.subjects)):
                req.append({"check": "curve_nonsingular", "subject": s})
        req.append({"check": "rank_data", "rank": 0})
    elif rule == "hyperselfproduct":
        req += [
            {"check": "genus2_model"},
            {"check": "weierstrass_root"},
            {"check": "genus2_point"},
            {"check": "odd_model_consistent"},
            {"check": "divisor_matches"},
            {"check": "torsion_bound"},
            {"check": "rank_data", "rank": 1},
        ]
        primes = w.get("primes", [])
        if len(primes) < 2:
            raise VerificationError("fewer than two reduction primes recorded")
        for p in primes:
            req.append({"check": "jacobian_order", "prime": p})
        from .intarith import divisors as _divs

        for n in _divs(w["torsion_bound"]):
            req.append({"check": "multiple_nonzero", "n": n})
    elif rule == "est_family":
        for which in (0, 1):
            req.append({"check": "est_model", "which": which})
            req.append({"check": "est_point", "which": which})
            req.append({"check": "est_nontorsion", "which": which})
            req.append({"check": "rank_data", "subject": which, "rank": 1})
    elif rule == "isogenous_rank1":
        for s in (0, 1):
            req.append({"check": "curve_nonsingular", "subject": s})
        req.append({"check": "isogeny_class_match"})
        req.append({"check": "rank_data", "rank": 1})
    elif rule == "product_combine":
        req.append({"check": "pair_coverage"})
        for i in range(len(cert.subjects)):
            req.append({"check": "factor_rational_point", "factor": i})
        for k in range(len(w["pairs"])):
            req.append({"check": "subcertificate", "pair": k})
    elif rule == "fixture":
        req.append({"check": "citation_present"})
        if any("a_invariants" in s for s in cert.subjects):
            req.append({"check": "fixture_models"})
    return req


def _step_covers(step: dict, need: dict) -> bool:
    return all(step.get(k) == v for k, v in need.items())


def verify_certificate(cert: Certificate) -> dict:
    """Re-execute every transcript assertion; raises VerificationError.

    First the witnesses-derived obligation list is matched against the
    transcript (a missing obligation fails verification), then every
    transcript step is executed.  Returns a report with the executed checks
    and whether the rule is fully machine-checked or additionally leans on
    external data/literature.
    """
    if cert.meta.get("stated_digest"):
        raise VerificationError(
            "stated digest does not match the payload (tampered certificate)"
        )
    for need in _required_steps(cert):
        if not any(_step_covers(step, need) for step in cert.transcript):
            raise VerificationError(f"transcript is missing the obligation {need}")
    results = []
    for step in cert.transcript:
        name = step.get("check")
        fn = _CHECKS.get(name)
        if fn is None:
            raise VerificationError(f"unknown transcript check {name!r}")
        fn(cert, step)
        results.append(name)
    return {
        "rule": cert.rule,
        "digest": cert.digest(),
        "checks": results,
        "fully_machine_checked": cert.rule in MACHINE_RULES,
        "external_dependencies": cert.provenance.get("external_dependencies", []),
    }
