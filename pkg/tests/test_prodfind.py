import numpy as np
import pytest

from qubitlocc.config import RunConfig
from qubitlocc.corpus import corpus_get, ub_states
from qubitlocc.errors import PreconditionError
from qubitlocc.prodfind import fubini_study, is_product, product_states_in_subspace, upb_check
from qubitlocc.qstate import Subspace, ket, kron, random_unitary
from qubitlocc.upb import UpbAngles, canonical_upb

CFG = RunConfig()


def hit_vectors(res):
    return [h.vector for h in res.hits]


def matches(hits, targets, tol=1e-6):
    return len(hits) == len(targets) and all(min(fubini_study(h, t) for t in targets) <= tol for h in hits)


class TestIsProduct:
    def test_basis_state(self):
        f = is_product(ket("010"))
        assert f is not None
        for got, want in zip(f, ["0", "1", "0"]):
            assert np.allclose(got, ket(want))

    def test_w_is_entangled(self):
        assert is_product((ket("001") + ket("010") + ket("100")) / np.sqrt(3)) is None

    def test_upb_member_round_trip(self):
        a = UpbAngles(np.pi / 4, np.pi / 3, np.pi / 6)
        psi = kron(a.vec(0), [0, 1], a.vec_perp(2))
        f = is_product(psi)
        assert f is not None
        assert np.linalg.norm(kron(*f) - psi) <= 1e-9


class TestProductStates:
    def test_two_qubit_pair(self):
        res = product_states_in_subspace([ket("00"), ket("11")], CFG)
        assert matches(hit_vectors(res), [ket("00"), ket("11")])
        assert res.completeness == "high"

    def test_s5_unique(self):
        res = product_states_in_subspace(corpus_get("S5").states, CFG)
        assert matches(hit_vectors(res), [ket("000")])

    def test_upb_span_has_four(self):
        members = canonical_upb(UpbAngles(np.pi / 4, np.pi / 4, np.pi / 4))
        res = product_states_in_subspace(members, CFG)
        assert matches(hit_vectors(res), [np.asarray(m) for m in members])

    def test_hits_are_products_in_span(self):
        S = Subspace.from_vectors(corpus_get("S5").states)
        for h in product_states_in_subspace(S, CFG).hits:
            assert h.residual <= CFG.tol.prod
            assert S.residual(h.vector) <= 1e-9
            assert is_product(h.vector) is not None

    def test_gauge_invariance(self, rng):
        members = [np.asarray(m) for m in canonical_upb(UpbAngles(np.pi / 4, np.pi / 3, np.pi / 6))]
        base = hit_vectors(product_states_in_subspace(members, CFG))
        B = np.column_stack(members) @ random_unitary(4, rng)
        mixed = hit_vectors(product_states_in_subspace(Subspace(B), CFG))
        assert matches(mixed, base)

    @pytest.mark.parametrize("name", ["S5", "UPB3"])
    def test_restart_doubling_is_stable(self, name):
        states = corpus_get(name).states
        a = hit_vectors(product_states_in_subspace(states, CFG, restarts=256))
        b = hit_vectors(product_states_in_subspace(states, CFG, restarts=512))
        assert matches(a, b)

    def test_continuous_family_is_flagged(self):
        # span{|00>, |01>} = |0> (x) anything
        res = product_states_in_subspace([ket("00"), ket("01")], CFG)
        assert res.hits and any(h.family_dim >= 1 for h in res.hits)


class TestUpbCheck:
    def test_canonical_upb(self):
        res = upb_check(canonical_upb(UpbAngles(np.pi / 4, np.pi / 3, np.pi / 6)), CFG)
        assert res.orthonormal_products and res.unextendible

    def test_ub1(self):
        res = upb_check(corpus_get("UB1").states, CFG)
        assert not res.orthonormal_products and res.unextendible

    def test_extendible(self):
        res = upb_check([ket(b) for b in ("000", "001", "010", "011")], CFG)
        assert not res.unextendible
        comp = Subspace.from_vectors([ket(b) for b in ("100", "101", "110", "111")])
        assert res.complement_product_hits
        assert all(comp.residual(h.vector) <= 1e-9 for h in res.complement_product_hits)

    def test_dependent_rejected(self):
        with pytest.raises(PreconditionError):
            upb_check([ket("000"), ket("000")], CFG)

    def test_ub_family_random_phases(self, rng):
        for _ in range(5):
            th = np.sort(rng.uniform(0, 2 * np.pi, 4))
            for sign in (1, -1):
                assert upb_check(ub_states(th, sign), CFG).unextendible

    def test_ub_family_degenerate(self):
        # equal gaps between consecutive phase pairs
        res = upb_check(ub_states((0.0, 0.5, 1.0, 1.5), 1, check=False), CFG)
        assert not res.unextendible
        assert res.complement_product_hits
