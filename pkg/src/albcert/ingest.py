"""Curve metadata ingestion: local exports, the bundled dataset, and an
optional HTTP fetcher with a content-addressed cache.

Ranks, torsion structures, and isogeny classes are *inputs*: this package
never computes a Mordell-Weil rank.  Every record tracks where its rank came
from (proved | analytic | user) and that provenance flows into any
certificate built from it.  Loaded generators are checked to lie on their
curve exactly; a torsion_structure claim of [2, 2] is cross-checked against
the 2-torsion count.
"""

from __future__ import annotations

import csv
import hashlib
import json
import os
import urllib.error
import urllib.parse
import urllib.request
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

from .curves import ECPoint, EllipticCurve, two_torsion
from .errors import NetworkError, ParseError, SchemaDrift, SingularCurve, ValidationError
from .genus2 import Genus2Curve

RANK_PROVENANCES = ("proved", "analytic", "user")

ENV_BASE_URL = "ALBCERT_DB_URL"
ENV_CACHE_DIR = "ALBCERT_CACHE_DIR"


@dataclass(frozen=True)
class CurveRecord:
    label: str
    a_invariants: tuple[Fraction, ...]
    rank: int
    rank_provenance: str
    torsion_structure: tuple[int, ...]
    generators: tuple[ECPoint, ...] = ()
    isogeny_class: str = ""
    conductor: int = 0
    notes: str = ""

    def curve(self) -> EllipticCurve:
        return EllipticCurve.from_a_invariants(self.a_invariants)

    def validate(self) -> None:
        if self.rank_provenance not in RANK_PROVENANCES:
            raise ValidationError(
                f"{self.label}: unknown rank provenance {self.rank_provenance!r}"
            )
        try:
            E = self.curve()
        except SingularCurve as exc:
            raise ValidationError(f"{self.label}: {exc}")
        for P in self.generators:
            if not E.contains(P):
                raise ValidationError(f"{self.label}: generator {P} is off the curve")
        if tuple(self.torsion_structure) == (2, 2) and len(two_torsion(E)) != 4:
            raise ValidationError(
                f"{self.label}: claims (Z/2)^2 torsion but lacks full 2-torsion"
            )


@dataclass(frozen=True)
class Genus2Record:
    label: str
    f_coefficients: tuple[Fraction, ...]
    jacobian_rank: int
    rank_provenance: str
    conductor: int = 0
    known_points: tuple[tuple[Fraction, Fraction], ...] = ()
    notes: str = ""

    def curve(self) -> Genus2Curve:
        return Genus2Curve(poly=self.f_coefficients)

    def validate(self) -> None:
        if self.rank_provenance not in RANK_PROVENANCES:
            raise ValidationError(
                f"{self.label}: unknown rank provenance {self.rank_provenance!r}"
            )
        C = self.curve()  # Degenerate propagates for non-genus-2 input
        for x, y in self.known_points:
            if not C.contains(x, y):
                raise ValidationError(f"{self.label}: known point off the curve")


# ---------------------------------------------------------------------------
# (de)serialization

_CSV_COLUMNS = [
    "label", "a1", "a2", "a3", "a4", "a6", "rank", "rank_provenance",
    "torsion_structure", "generators", "isogeny_class", "conductor",
]


def _enc_gens(gens) -> str:
    return ";".join(f"{p.x}:{p.y}" for p in gens)


def _dec_gens(s: str):
    if not s:
        return ()
    out = []
    for chunk in s.split(";"):
        xs, ys = chunk.split(":")
        out.append(ECPoint(Fraction(xs), Fraction(ys)))
    return tuple(out)


def record_to_dict(rec: CurveRecord) -> dict:
    return {
        "label": rec.label,
        "a_invariants": [str(a) for a in rec.a_invariants],
        "rank": rec.rank,
        "rank_provenance": rec.rank_provenance,
        "torsion_structure": list(rec.torsion_structure),
        "generators": [[str(p.x), str(p.y)] for p in rec.generators],
        "isogeny_class": rec.isogeny_class,
        "conductor": rec.conductor,
        "notes": rec.notes,
    }


def record_from_dict(obj: dict) -> CurveRecord:
    try:
        return CurveRecord(
            label=obj["label"],
            a_invariants=tuple(Fraction(a) for a in obj["a_invariants"]),
            rank=int(obj["rank"]),
            rank_provenance=obj["rank_provenance"],
            torsion_structure=tuple(int(t) for t in obj.get("torsion_structure", [])),
            generators=tuple(
                ECPoint(Fraction(x), Fraction(y)) for x, y in obj.get("generators", [])
            ),
            isogeny_class=obj.get("isogeny_class", ""),
            conductor=int(obj.get("conductor", 0)),
            notes=obj.get("notes", ""),
        )
    except (KeyError, ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad curve record {obj.get('label', '?')}: {exc}")


def g2_record_to_dict(rec: Genus2Record) -> dict:
    return {
        "label": rec.label,
        "f_coefficients": [str(c) for c in rec.f_coefficients],
        "jacobian_rank": rec.jacobian_rank,
        "rank_provenance": rec.rank_provenance,
        "conductor": rec.conductor,
        "known_points": [[str(x), str(y)] for x, y in rec.known_points],
        "notes": rec.notes,
    }


def g2_record_from_dict(obj: dict) -> Genus2Record:
    try:
        return Genus2Record(
            label=obj["label"],
            f_coefficients=tuple(Fraction(c) for c in obj["f_coefficients"]),
            jacobian_rank=int(obj["jacobian_rank"]),
            rank_provenance=obj["rank_provenance"],
            conductor=int(obj.get("conductor", 0)),
            known_points=tuple(
                (Fraction(x), Fraction(y)) for x, y in obj.get("known_points", [])
            ),
            notes=obj.get("notes", ""),
        )
    except (KeyError, ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad genus-2 record {obj.get('label', '?')}: {exc}")


def load_curves(path, format: str | None = None, strict: bool = True) -> list[CurveRecord]:
    """Load and validate elliptic curve records from CSV or JSON.

    Invalid rows raise ValidationError naming the row when ``strict``;
    otherwise they are reported to stderr and skipped.
    """
    fmt = format or ("csv" if str(path).endswith(".csv") else "json")
    records: list[CurveRecord] = []
    problems: list[str] = []
    if fmt == "csv":
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            for lineno, row in enumerate(reader, start=2):
                try:
                    rec = CurveRecord(
                        label=row["label"],
                        a_invariants=tuple(Fraction(row[k]) for k in ("a1", "a2", "a3", "a4", "a6")),
                        rank=int(row["rank"]),
                        rank_provenance=row["rank_provenance"],
                        torsion_structure=tuple(
                            int(t) for t in row["torsion_structure"].split(";") if t
                        ),
                        generators=_dec_gens(row.get("generators", "")),
                        isogeny_class=row.get("isogeny_class", ""),
                        conductor=int(row.get("conductor") or 0),
                    )
                    rec.validate()
                    records.append(rec)
                except (KeyError, ValueError, ValidationError, ParseError) as exc:
                    problems.append(f"line {lineno}: {exc}")
    elif fmt == "json":
        try:
            with open(path) as fh:
                doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: {exc}")
        for i, obj in enumerate(doc.get("curves", [])):
            try:
                rec = record_from_dict(obj)
                rec.validate()
                records.append(rec)
            except (ValidationError, ParseError) as exc:
                problems.append(f"record {i}: {exc}")
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if problems:
        if strict:
            raise ValidationError("; ".join(problems))
        import sys

        for p in problems:
            print(f"warning: skipped {p}", file=sys.stderr)
    return records


def save_curves(path, records, format: str | None = None) -> None:
    fmt = format or ("csv" if str(path).endswith(".csv") else "json")
    if fmt == "csv":
        with open(path, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=_CSV_COLUMNS)
            writer.writeheader()
            for rec in records:
                writer.writerow(
                    {
                        "label": rec.label,
                        "a1": rec.a_invariants[0],
                        "a2": rec.a_invariants[1],
                        "a3": rec.a_invariants[2],
                        "a4": rec.a_invariants[3],
                        "a6": rec.a_invariants[4],
                        "rank": rec.rank,
                        "rank_provenance": rec.rank_provenance,
                        "torsion_structure": ";".join(map(str, rec.torsion_structure)),
                        "generators": _enc_gens(rec.generators),
                        "isogeny_class": rec.isogeny_class,
                        "conductor": rec.conductor,
                    }
                )
    else:
        with open(path, "w") as fh:
            json.dump({"curves": [record_to_dict(r) for r in records]}, fh, indent=1)


def load_genus2(path) -> list[Genus2Record]:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}")
    out = []
    for obj in doc.get("genus2", []):
        rec = g2_record_from_dict(obj)
        rec.validate()
        out.append(rec)
    return out


# ---------------------------------------------------------------------------
# bundled dataset

_BUNDLED_CURVES: list[CurveRecord] | None = None
_BUNDLED_G2: list[Genus2Record] | None = None


def bundled_curves() -> list[CurveRecord]:
    """The packaged elliptic-curve dataset (validated on first load)."""
    global _BUNDLED_CURVES
    if _BUNDLED_CURVES is None:
        text = resources.files("albcert").joinpath("data/elliptic_curves.json").read_text()
        doc = json.loads(text)
        recs = [record_from_dict(o) for o in doc["curves"]]
        for r in recs:
            r.validate()
        _BUNDLED_CURVES = recs
    return list(_BUNDLED_CURVES)


def bundled_genus2() -> list[Genus2Record]:
    global _BUNDLED_G2
    if _BUNDLED_G2 is None:
        text = resources.files("albcert").joinpath("data/genus2_curves.json").read_text()
        doc = json.loads(text)
        recs = [g2_record_from_dict(o) for o in doc["genus2"]]
        for r in recs:
            r.validate()
        _BUNDLED_G2 = recs
    return list(_BUNDLED_G2)


def query_records(
    records,
    rank: int | None = None,
    torsion_structure=None,
    limit: int | None = None,
    order_by_conductor: bool = True,
):
    """Filter records the way the scan protocol asks for them."""
    out = [r for r in records]
    if rank is not None:
        out = [r for r in out if r.rank == rank]
    if torsion_structure is not None:
        want = tuple(torsion_structure)
        out = [r for r in out if tuple(r.torsion_structure) == want]
    if order_by_conductor:
        out.sort(key=lambda r: (r.conductor, r.label))
    if limit is not None:
        out = out[:limit]
    return out


def find_curve(label_or_ai: str, records=None) -> CurveRecord:
    """Resolve a label (or literal a-invariant list 'a1,a2,a3,a4,a6')."""
    if "," in label_or_ai or label_or_ai.startswith("["):
        parts = [p for p in label_or_ai.strip("[]").split(",") if p.strip()]
        if len(parts) != 5:
            raise ParseError("a-invariants need exactly five entries")
        ai = tuple(Fraction(p.strip()) for p in parts)
        return CurveRecord(
            label=label_or_ai,
            a_invariants=ai,
            rank=-1,
            rank_provenance="user",
            torsion_structure=(),
        )
    for rec in records if records is not None else bundled_curves():
        if rec.label == label_or_ai:
            return rec
    raise ParseError(f"no curve with label {label_or_ai!r} in the dataset")


# ---------------------------------------------------------------------------
# remote fetch with a content-addressed cache


def _cache_dir(explicit=None) -> str:
    d = explicit or os.environ.get(ENV_CACHE_DIR) or os.path.join(
        os.path.expanduser("~"), ".cache", "albcert"
    )
    os.makedirs(d, exist_ok=True)
    return d


def _query_key(query: dict) -> str:
    canon = json.dumps(query, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


def fetch_curves(
    query: dict,
    base_url: str | None = None,
    cache_dir: str | None = None,
    offline: bool = False,
    timeout: float = 30.0,
) -> list[CurveRecord]:
    """Fetch curve records matching a query, caching replies to disk.

    The cache is content-addressed by the canonical query, so identical
    queries replay byte-identically and offline runs never touch the
    network.  A cold cache in offline mode raises NetworkError; replies
    missing required fields raise SchemaDrift.
    """
    cdir = _cache_dir(cache_dir)
    key = _query_key(query)
    cpath = os.path.join(cdir, f"{key}.json")
    if os.path.exists(cpath):
        with open(cpath) as fh:
            doc = json.load(fh)
    elif offline:
        raise NetworkError(f"offline and no cached reply for query {query}")
    else:
        url = base_url or os.environ.get(ENV_BASE_URL)
        if not url:
            raise NetworkError(f"no endpoint configured; set {ENV_BASE_URL}")
        params = {k: str(v) for k, v in query.items()}
        full = url.rstrip("/") + "/curves?" + urllib.parse.urlencode(sorted(params.items()))
        try:
            with urllib.request.urlopen(full, timeout=timeout) as resp:
                raw = resp.read()
        except (urllib.error.URLError, OSError) as exc:
            raise NetworkError(f"fetch failed: {exc}")
        try:
            doc = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise SchemaDrift(f"remote reply is not JSON: {exc}")
        tmp = cpath + ".tmp"
        with open(tmp, "w") as fh:
            json.dump(doc, fh, sort_keys=True)
        os.replace(tmp, cpath)  # atomic publish
    if "curves" not in doc:
        raise SchemaDrift("remote reply lacks the 'curves' field")
    out = []
    for obj in doc["curves"]:
        try:
            rec = record_from_dict(obj)
        except ParseError as exc:
            raise SchemaDrift(str(exc))
        rec.validate()
        out.append(rec)
    return out
