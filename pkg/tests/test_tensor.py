from fractions import Fraction

import pytest

from albcert.certmodel import Certificate, Undecided
from albcert.curves import ECPoint, EllipticCurve, add, scalar_mul, two_torsion
from albcert.errors import NotFullTwoTorsion
from albcert.heights import Decomposition, empty_basis, extend_basis
from albcert.hpoints import HPoint
from albcert.tensor import (
    LEntry,
    RunOptions,
    TensorState,
    TensorVector,
    certify_pair,
    exact_rank,
    prepare_variants,
    process_point,
    rank_and_membership,
    run,
    run_and_certify,
)

F = Fraction


class TestExactLinearAlgebra:
    def test_trivial_memberships(self):
        z = TensorVector(entries=(F(0), F(0)))
        nz = TensorVector(entries=(F(3), F(-7)))
        assert rank_and_membership([], z) is False
        assert rank_and_membership([], nz) is True
        e1 = TensorVector(entries=(F(1), F(0)))
        e2 = TensorVector(entries=(F(0), F(1)))
        assert rank_and_membership([e1, e2], nz) is False

    def test_rank(self):
        vs = [
            TensorVector(entries=(F(1), F(2), F(3))),
            TensorVector(entries=(F(2), F(4), F(6))),
            TensorVector(entries=(F(0), F(1), F(1))),
        ]
        assert exact_rank(vs) == 2

    def test_fractional_entries(self):
        a = TensorVector(entries=(F(1, 3), F(1, 5)))
        b = TensorVector(entries=(F(5, 3), F(1)))
        assert rank_and_membership([a], b) is False  # b = 5a


class TestRun:
    def test_rejects_missing_two_torsion(self, curve_37a1):
        with pytest.raises(NotFullTwoTorsion):
            run(curve_37a1, curve_37a1, RunOptions(bound=5))

    def test_draft_pair_certifies(self, draft_pair):
        E1, E2, _, _ = draft_pair
        state = run(E1, E2, RunOptions(bound=60, target=1, self_check=True))
        assert len(state.L) == 1
        entry = state.L[0]
        # the accepted point is the known small point on the base model
        assert entry.point.x in (F(24, 25), F(-24, 25))
        assert state.basis1.rank == 1 and state.basis2.rank == 1
        assert state.T[0].entries == (F(1),)

    def test_replay_determinism(self, draft_pair):
        E1, E2, _, _ = draft_pair
        a = run(E1, E2, RunOptions(bound=120))
        b = run(E1, E2, RunOptions(bound=120))
        assert [e.point for e in a.L] == [e.point for e in b.L]
        assert a.T == b.T
        assert a.points_seen == b.points_seen

    def test_structural_invariants_throughout(self, draft_pair):
        E1, E2, _, _ = draft_pair
        state = run(E1, E2, RunOptions(bound=120, self_check=True, target=None))
        state.check_invariants(max_rank=state.basis1.rank * state.basis2.rank)
        assert exact_rank(state.T) == len(state.T) == len(state.L)

    def test_recompute_on_extend_self_consistency(self, draft_pair):
        # replaying the cached coefficients at final (r, s) reproduces T
        E1, E2, _, _ = draft_pair
        state = run(E1, E2, RunOptions(bound=120))
        r, s = state.basis1.rank, state.basis2.rank
        rebuilt = []
        for e in state.coeff_cache:
            d1 = e.dec1.tensor_coords() + (F(0),) * (r - len(e.dec1.coeffs))
            d2 = e.dec2.tensor_coords() + (F(0),) * (s - len(e.dec2.coeffs))
            rebuilt.append(TensorVector(entries=tuple(x * y for x in d1 for y in d2)))
        keep = []
        for v in rebuilt:
            if rank_and_membership(keep, v):
                keep.append(v)
        assert keep == state.T


class TestProcessPoint:
    def test_torsion_pair_gives_zero_vector(self, draft_pair):
        E1, E2, _, _ = draft_pair
        data = prepare_variants(E1, E2)
        state = TensorState(basis1=empty_basis(E1), basis2=empty_basis(E2), variants=data)
        # Weierstrass point maps to 2-torsion on both sides
        P = HPoint.affine(F(3, 4), 0)
        assert data[0].curve.contains(F(3, 4), F(0))
        accepted = process_point(state, P, data[0], 0)
        assert accepted is False
        assert state.L == [] and state.T == []

    def test_doubled_image_is_dependent(self, draft_pair):
        E1, E2, P1, P2 = draft_pair
        state = TensorState(basis1=empty_basis(E1), basis2=empty_basis(E2))
        state.basis1 = extend_basis(state.basis1, P1)
        state.basis2 = extend_basis(state.basis2, P2)
        e = LEntry(
            point=HPoint.affine(0, 0), variant=0, image1=P1, image2=P2,
            dec1=Decomposition((1,), 1, ECPoint(), 1),
            dec2=Decomposition((1,), 1, ECPoint(), 1),
        )
        v = TensorVector.from_decompositions(e.dec1, e.dec2)
        from albcert.tensor import _echelon_insert

        assert _echelon_insert(state.echelon, list(v.entries))
        state.T.append(v)
        state.L.append(e)
        # 2P1 (x) 2P2 = 4 (P1 (x) P2): dependent
        v2 = TensorVector.from_decompositions(
            Decomposition((2,), 1, ECPoint(), 1), Decomposition((2,), 1, ECPoint(), 1)
        )
        assert v2.entries == (F(4),)
        assert rank_and_membership(state.T, v2) is False


class TestCertifyPair:
    def test_rank0_shortcut(self, draft_pair):
        E1, E2, _, _ = draft_pair
        cert = run_and_certify(E1, E2, (0, 1))
        assert isinstance(cert, Certificate)
        assert cert.rule == "rank0"

    def test_undecided_records_deficit(self, draft_pair):
        E1, E2, _, _ = draft_pair
        res = run_and_certify(E1, E2, (2, 2), RunOptions(bound=40))
        assert isinstance(res, Undecided)
        assert res.details["needed"] == 4
        assert res.details["found"] <= 4

    def test_threshold_case(self, draft_pair):
        E1, E2, _, _ = draft_pair
        cert = run_and_certify(
            E1, E2, (1, 1), RunOptions(bound=80), {"rank_source": "user"},
            ("c205", "c117"),
        )
        assert isinstance(cert, Certificate)
        assert cert.rule == "algfinite"
        assert len(cert.witnesses["entries"]) == 1


class TestSelfPair:
    def test_self_product_certifies(self, draft_pair):
        # identical factors degenerate one glued model; the rest suffice
        E1, _, _, _ = draft_pair
        cert = run_and_certify(E1, E1, (1, 1), RunOptions(bound=2000),
                               {"rank_source": "user"}, ("c205.a", "c205.a"))
        assert isinstance(cert, Certificate)
        assert len(cert.witnesses["variants"]) == 5
        from albcert.certify import verify_certificate

        verify_certificate(cert)
