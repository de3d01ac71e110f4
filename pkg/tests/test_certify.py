import json
from fractions import Fraction

import pytest

from albcert.certmodel import Certificate, Undecided, ZeroCycle, render_cycle
from albcert.certify import (
    certify_est_pair,
    certify_isogenous_rank1,
    combine_product,
    est_curve,
    fixture_pairs,
    verify_certificate,
)
from albcert.curves import ECPoint, EllipticCurve
from albcert.errors import (
    MissingPairCertificate,
    MissingRationalPoint,
    SingularCurve,
    VerificationError,
)
from albcert.tensor import RunOptions, run_and_certify

F = Fraction


class TestZeroCycle:
    def test_cancellation_at_base_points(self):
        assert render_cycle("O1", "O2", "O1", "O2").is_zero()

    def test_generic_four_terms(self):
        cyc = render_cycle("P", "Q", "O1", "O2")
        assert len(cyc.terms) == 4
        signs = {pair: c for c, pair in cyc.terms}
        assert signs[("P", "Q")] == 1
        assert signs[("P", "O2")] == -1
        assert signs[("O1", "Q")] == -1
        assert signs[("O1", "O2")] == 1

    def test_degree_zero_always(self):
        for p, q in [("P", "Q"), ("P", "O2"), ("O1", "Q"), ("A", "A")]:
            assert render_cycle(p, q, "O1", "O2").degree() == 0

    def test_collisions_collapse(self):
        # touching a base point in either slot makes everything cancel
        assert render_cycle("P", "O2", "O1", "O2").is_zero()
        assert render_cycle("O1", "Q", "O1", "O2").is_zero()
        # equal non-base labels keep four distinct terms
        assert len(render_cycle("A", "A", "O1", "O2").terms) == 4


class TestEstFamily:
    def test_displayed_member(self):
        E, P = est_curve(1, 1)
        assert E.a_invariants() == (0, 0, 0, -3, 11)
        assert P == ECPoint(F(-2), F(-3))
        assert E.contains(P)

    def test_singular_member_rejected(self):
        with pytest.raises(SingularCurve):
            est_curve(1, 0)

    def test_random_members_exactly_on_curve(self, rng):
        done = 0
        while done < 100:
            s = F(rng.randint(-20, 20), rng.randint(1, 6))
            t = F(rng.randint(-20, 20), rng.randint(1, 6))
            try:
                E, P = est_curve(s, t)
            except SingularCurve:
                continue
            done += 1
            assert E.contains(P)

    def test_pair_certificate(self):
        cert = certify_est_pair(1, 2, 3, (1, 1), {"rank_source": "user"})
        assert isinstance(cert, Certificate) and cert.rule == "est_family"
        rep = verify_certificate(cert)
        assert not rep["fully_machine_checked"]

    def test_torsion_member_undecided(self):
        # at (s, t) = (1, -4/3) the marked point has order 5 on a
        # nonsingular member, so the pair rule must refuse
        s, t = F(1), F(-4, 3)
        from albcert.curves import is_torsion

        E, P = est_curve(s, t)
        assert is_torsion(E, P) == (True, 5)
        res = certify_est_pair(s, t, F(5), (1, 1))
        assert isinstance(res, Undecided) and res.reason == "marked_point_torsion"

    def test_rank_two_undecided(self):
        res = certify_est_pair(1, 2, 3, (2, 1))
        assert isinstance(res, Undecided)


class TestIsogenous:
    def setup_method(self):
        self.E = EllipticCurve(0, 0, 1, -1, 0)

    def test_self_pair(self):
        cert = certify_isogenous_rank1(
            self.E, self.E,
            {"class1": "37.a", "class2": "37.a", "rank": 1, "rank_source": "proved",
             "generator": ECPoint(F(0), F(0))},
            ("37a1", "37a1"),
        )
        assert isinstance(cert, Certificate)
        verify_certificate(cert)

    def test_rank_two_undecided(self):
        res = certify_isogenous_rank1(
            self.E, self.E, {"class1": "37.a", "class2": "37.a", "rank": 2}
        )
        assert isinstance(res, Undecided)

    def test_different_classes_undecided(self):
        res = certify_isogenous_rank1(
            self.E, self.E, {"class1": "37.a", "class2": "43.a", "rank": 1}
        )
        assert isinstance(res, Undecided)


class TestFixtures:
    def test_inventory(self):
        fps = fixture_pairs()
        assert len(fps) == 10  # two modular pairs + eight bielliptic pairs
        names = [c.witnesses["name"] for c in fps]
        assert any("37" in n for n in names) and any("91" in n for n in names)
        assert sum("bielliptic" in n for n in names) == 8

    def test_modular_pairs_have_parsing_models(self):
        for cert in fixture_pairs():
            verify_certificate(cert)

    def test_conductor_37_model(self):
        cert = fixture_pairs()[0]
        assert cert.subjects[0]["a_invariants"] == ["0", "0", "1", "-1", "0"]


class TestCombine:
    def _pair_cert(self, la, lb):
        E1 = EllipticCurve(0, -(F(2) + F(5)), 0, 10, 0)
        cert = Certificate(
            rule="fixture",
            subjects=[{"label": la}, {"label": lb}],
            witnesses={"name": f"{la}-{lb}"},
            transcript=[{"check": "citation_present"}],
            provenance={"method": "synthetic test pair"},
        )
        return cert

    def test_d2_wraps_single_pair(self):
        c = self._pair_cert("A", "B")
        prod = combine_product([c], ["A", "B"], {"A": "O", "B": "O"})
        assert prod.rule == "product_combine"
        verify_certificate(prod)

    def test_d3_full_coverage(self):
        certs = [self._pair_cert(*p) for p in (("A", "B"), ("A", "C"), ("B", "C"))]
        prod = combine_product(certs, ["A", "B", "C"], {l: "O" for l in "ABC"})
        verify_certificate(prod)
        # order insensitivity: permuting factors covers the same pair set
        prod2 = combine_product(certs, ["C", "A", "B"], {l: "O" for l in "ABC"})
        pairs1 = {frozenset(p["labels"]) for p in prod.witnesses["pairs"]}
        pairs2 = {frozenset(p["labels"]) for p in prod2.witnesses["pairs"]}
        assert pairs1 == pairs2

    def test_missing_pair_detected(self):
        certs = [self._pair_cert("A", "B"), self._pair_cert("A", "C")]
        with pytest.raises(MissingPairCertificate):
            combine_product(certs, ["A", "B", "C"], {l: "O" for l in "ABC"})

    def test_missing_rational_point(self):
        with pytest.raises(MissingRationalPoint):
            combine_product([self._pair_cert("A", "B")], ["A", "B"], {"A": "O"})

    def test_repeated_factor_needs_self_pair(self):
        certs = [self._pair_cert("A", "B")]
        with pytest.raises(MissingPairCertificate):
            combine_product(certs, ["A", "A", "B"], {"A": "O", "B": "O"})
        certs.append(self._pair_cert("A", "A"))
        prod = combine_product(certs, ["A", "A", "B"], {"A": "O", "B": "O"})
        verify_certificate(prod)


class TestVerifierNegative:
    def test_tampered_witness_fails(self, draft_pair):
        E1, E2, _, _ = draft_pair
        cert = run_and_certify(E1, E2, (1, 1), RunOptions(bound=80),
                               {"rank_source": "user"}, ("a", "b"))
        doc = json.loads(cert.to_json())
        doc.pop("digest")
        # corrupt a decomposition coefficient
        doc["witnesses"]["entries"][0]["dec1"]["coeffs"][0] += 1
        bad = Certificate.from_json(json.dumps(doc))
        with pytest.raises(VerificationError):
            verify_certificate(bad)

    def test_unknown_check_rejected(self):
        cert = Certificate(
            rule="fixture", subjects=[{"label": "X"}], witnesses={"name": "x"},
            transcript=[{"check": "no_such_check"}], provenance={"method": "m"},
        )
        with pytest.raises(VerificationError):
            verify_certificate(cert)


class TestEmitVerifyFuzz:
    def test_every_emitted_certificate_verifies(self, rng):
        # round-trip property over random constructed pairs: whatever the
        # tool emits, the verifier accepts (and serialization is stable)
        from conftest import random_point_curve
        from albcert.errors import AlbcertError

        emitted = 0
        tried = 0
        while emitted < 4 and tried < 20:
            tried += 1
            E1, _ = random_point_curve(rng)
            E2, _ = random_point_curve(rng)
            if E1.a_invariants() == E2.a_invariants():
                continue
            try:
                res = run_and_certify(E1, E2, (1, 1), RunOptions(bound=300),
                                      {"rank_source": "user"})
            except AlbcertError:
                continue
            if not isinstance(res, Certificate):
                continue
            emitted += 1
            rep = verify_certificate(res)
            assert rep["rule"] == "algfinite"
            again = Certificate.from_json(res.to_json())
            assert again.digest() == res.digest()
            verify_certificate(again)
        assert emitted >= 2


class TestVerifierSoundness:
    def test_constant_map_forgery_rejected(self, draft_pair):
        # a crafted certificate whose "covering maps" are constant would
        # satisfy the naive morphism identity (odd part vanishes as v = 0)
        # yet prove nothing; the verifier must refuse it
        E1, E2, P1, P2 = draft_pair
        cert = run_and_certify(E1, E2, (1, 1), RunOptions(bound=80),
                               {"rank_source": "user"}, ("a", "b"))
        doc = json.loads(cert.to_json())
        doc.pop("digest")
        v = doc["witnesses"]["variants"][doc["witnesses"]["entries"][0]["variant"]]
        v["phi1"]["u"] = {"num": [str(P1.x)], "den": ["1"]}
        v["phi1"]["v"] = {"num": [], "den": ["1"]}
        v["phi1"]["w"] = {"num": [str(P1.y)], "den": ["1"]}
        forged = Certificate.from_json(json.dumps(doc))
        with pytest.raises(VerificationError, match="odd part|morphism"):
            verify_certificate(forged)


class TestTranscriptObligations:
    def test_dropped_decomposition_step_rejected(self, draft_pair):
        E1, E2, _, _ = draft_pair
        cert = run_and_certify(E1, E2, (1, 1), RunOptions(bound=80),
                               {"rank_source": "user"}, ("a", "b"))
        doc = json.loads(cert.to_json())
        doc.pop("digest")
        doc["transcript"] = [
            s for s in doc["transcript"] if s["check"] != "entry_decomposition"
        ]
        with pytest.raises(VerificationError, match="missing the obligation"):
            verify_certificate(Certificate.from_json(json.dumps(doc)))

    def test_dropped_divisor_multiple_rejected(self):
        from albcert.genus2 import Genus2Curve, certify_self_product
        from albcert.polys import pscale
        from albcert.scholten import build_curve

        H = build_curve(-144, -369, -81, -432)
        C = Genus2Curve(poly=tuple(pscale(H.f(), H.lead)))
        cert = certify_self_product(C, 1, bound=40, provenance={"rank_source": "user"})
        assert isinstance(cert, Certificate)
        assert cert.witnesses["torsion_bound"] > 1  # several multiples to drop
        doc = json.loads(cert.to_json())
        doc.pop("digest")
        kept = [s for s in doc["transcript"]
                if not (s["check"] == "multiple_nonzero" and s["n"] != 1)]
        assert len(kept) < len(doc["transcript"])
        doc["transcript"] = kept
        with pytest.raises(VerificationError, match="missing the obligation"):
            verify_certificate(Certificate.from_json(json.dumps(doc)))

    def test_fabricated_extra_entry_rejected(self, draft_pair):
        # adding a witnesses entry without its transcript checks must fail
        E1, E2, _, _ = draft_pair
        cert = run_and_certify(E1, E2, (1, 1), RunOptions(bound=80),
                               {"rank_source": "user"}, ("a", "b"))
        doc = json.loads(cert.to_json())
        doc.pop("digest")
        doc["witnesses"]["entries"].append(doc["witnesses"]["entries"][0])
        with pytest.raises(VerificationError):
            verify_certificate(Certificate.from_json(json.dumps(doc)))
