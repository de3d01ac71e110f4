"""Certificate data model, canonical JSON encoding, and zero-cycle rendering.

A certificate is a self-contained claim that the componentwise Albanese
kernel of a product is finite, under one named rule, together with every
witness needed to re-check the claim.  The serialization is deterministic
(sorted keys, exact rationals as strings), so certificates can be hashed,
diffed, and replayed byte-identically; wall-clock metadata lives outside
the hashed payload.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction

from .curves import ECPoint, EllipticCurve, INFINITY

SCHEMA_VERSION = "1"

RULES = (
    "algfinite",
    "rank0",
    "hyperselfproduct",
    "isogenous_rank1",
    "est_family",
    "product_combine",
    "fixture",
)

# rules whose mathematical content is fully re-checked by the verifier,
# as opposed to rules that additionally lean on cited literature
MACHINE_RULES = ("algfinite", "rank0", "hyperselfproduct")


def enc_fraction(x) -> str:
    return str(Fraction(x))


def dec_fraction(s: str) -> Fraction:
    return Fraction(s)


def enc_point(P: ECPoint):
    if P.is_infinity:
        return "infinity"
    return {"x": enc_fraction(P.x), "y": enc_fraction(P.y)}


def dec_point(obj) -> ECPoint:
    if obj == "infinity":
        return INFINITY
    return ECPoint(dec_fraction(obj["x"]), dec_fraction(obj["y"]))


def enc_curve(E: EllipticCurve, label: str | None = None):
    out = {"a_invariants": [enc_fraction(a) for a in E.a_invariants()]}
    if label:
        out["label"] = label
    return out


def dec_curve(obj) -> EllipticCurve:
    return EllipticCurve.from_a_invariants([dec_fraction(s) for s in obj["a_invariants"]])


def enc_poly(coeffs) -> list[str]:
    return [enc_fraction(c) for c in coeffs]


def dec_poly(lst) -> list[Fraction]:
    return [dec_fraction(s) for s in lst]


@dataclass(frozen=True)
class Undecided:
    """A non-result: the method could not certify, with the reason recorded."""

    reason: str
    details: dict = field(default_factory=dict)

    def __bool__(self):
        return False


@dataclass
class Certificate:
    rule: str
    subjects: list
    witnesses: dict
    transcript: list
    provenance: dict
    version: str = SCHEMA_VERSION
    meta: dict = field(default_factory=dict)  # excluded from hash/comparison

    def __post_init__(self):
        if self.rule not in RULES:
            raise ValueError(f"unknown rule {self.rule!r}")

    def payload(self) -> dict:
        return {
            "version": self.version,
            "rule": self.rule,
            "subjects": self.subjects,
            "witnesses": self.witnesses,
            "transcript": self.transcript,
            "provenance": self.provenance,
        }

    def canonical_bytes(self) -> bytes:
        return json.dumps(
            self.payload(), sort_keys=True, separators=(",", ":"), ensure_ascii=True
        ).encode()

    def digest(self) -> str:
        return hashlib.sha256(self.canonical_bytes()).hexdigest()

    def to_json(self, indent: int | None = 2) -> str:
        doc = self.payload()
        doc["digest"] = self.digest()
        if self.meta:
            doc["meta"] = self.meta
        return json.dumps(doc, sort_keys=True, indent=indent)

    @classmethod
    def from_json(cls, text: str) -> "Certificate":
        doc = json.loads(text)
        cert = cls(
            rule=doc["rule"],
            subjects=doc["subjects"],
            witnesses=doc["witnesses"],
            transcript=doc["transcript"],
            provenance=doc["provenance"],
            version=doc.get("version", SCHEMA_VERSION),
            meta=doc.get("meta", {}),
        )
        stated = doc.get("digest")
        if stated is not None and stated != cert.digest():
            # not an error: the verifier reports tampering explicitly
            cert.meta = dict(cert.meta, stated_digest=stated)
        return cert

    def save(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_json())
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "Certificate":
        with open(path) as fh:
            return cls.from_json(fh.read())


# ---------------------------------------------------------------------------
# zero-cycles attached to point pairs


@dataclass(frozen=True)
class ZeroCycle:
    """A finite formal integer combination of coordinate pairs of labels."""

    terms: tuple[tuple[int, tuple[str, str]], ...]

    @classmethod
    def from_terms(cls, raw) -> "ZeroCycle":
        acc: dict[tuple[str, str], int] = {}
        for coeff, pair in raw:
            key = (str(pair[0]), str(pair[1]))
            acc[key] = acc.get(key, 0) + int(coeff)
        terms = tuple(
            (c, k) for k, c in sorted(acc.items(), key=lambda kv: kv[0]) if c != 0
        )
        return cls(terms=terms)

    def degree(self) -> int:
        return sum(c for c, _ in self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for c, (a, b) in self.terms:
            sign = "+" if c >= 0 else "-"
            mag = abs(c)
            coeff = "" if mag == 1 else f"{mag}*"
            bits.append(f"{sign} {coeff}[{a},{b}]")
        out = " ".join(bits)
        return out[2:] if out.startswith("+ ") else out


def render_cycle(P: str, Q: str, O1: str, O2: str) -> ZeroCycle:
    """The degree-zero cycle [P,Q] - [P,O2] - [O1,Q] + [O1,O2].

    This is the class attached to a rational point pair relative to the base
    points; its coefficients always sum to zero, and it vanishes when both
    coordinates sit at the base points.
    """
    return ZeroCycle.from_terms(
        [(1, (P, Q)), (-1, (P, O2)), (-1, (O1, Q)), (1, (O1, O2))]
    )
