import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import BELL, PLUS, RHO1
from qubitlocc.errors import DimensionError, InvalidStateError, PreconditionError
from qubitlocc.qstate import (
    DensityOperator,
    PureState,
    Subspace,
    bloch_decompose,
    bloch_vector,
    collapse,
    from_bloch,
    ket,
    kron,
    pair_overlap_operator,
    perp,
    random_pure,
    random_unitary,
    support,
    support_contains,
)

# Frozen by hand: orthonormalize {|00>, |++>} and project |11>.
RESIDUAL_11 = np.sqrt(2 / 3)


def seeded(seed):
    return np.random.default_rng(seed)


def random_qubit(rng):
    v = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    return v / np.linalg.norm(v)


class TestSupport:
    def test_rank_one(self):
        S = support(np.outer(ket("000"), ket("000")))
        assert S.dim == 1
        assert S.contains(ket("000"))

    def test_mixture_of_two(self):
        S = support(RHO1)
        assert S.dim == 2
        assert S.contains(ket("00")) and S.contains(kron(PLUS, PLUS))

    def test_full_rank(self):
        assert support(np.eye(4) / 4).dim == 4

    def test_non_hermitian_rejected(self):
        m = np.eye(4, dtype=complex) / 4
        m[0, 1] = 0.1
        with pytest.raises(InvalidStateError):
            support(m)


class TestSupportContains:
    def test_member(self):
        assert support_contains(RHO1, ket("00"))

    def test_outside(self):
        assert not support_contains(RHO1, ket("11"))
        assert support(RHO1).residual(ket("11")) == pytest.approx(RESIDUAL_11, abs=1e-12)

    def test_full_support(self, rng):
        assert support_contains(np.eye(4) / 4, random_pure(2, rng))


class TestCollapse:
    def test_keep(self):
        out = collapse(ket("000"), 0, ket("0"))
        assert np.allclose(out.amplitudes, ket("00"))
        assert out.norm == pytest.approx(1)

    def test_vanish(self):
        assert collapse(ket("000"), 0, ket("1")).norm == 0

    def test_bell_plus(self):
        out = collapse(BELL, 0, PLUS)
        assert np.allclose(out.amplitudes, PLUS / np.sqrt(2))
        assert out.norm**2 == pytest.approx(0.5)

    def test_mixed_trace_is_probability(self):
        out = collapse(RHO1, 0, ket("0"))
        assert isinstance(out, DensityOperator)
        # <0|rho1|0> on qubit 0: 1/2 + 1/2 * 1/2
        assert out.trace == pytest.approx(0.75)

    def test_party_out_of_range(self):
        with pytest.raises(IndexError):
            collapse(ket("00"), 2, ket("0"))


class TestPairOverlap:
    def test_zero(self):
        N = pair_overlap_operator(ket("00"), ket("11"), 0)
        assert np.allclose(N.matrix, 0)

    def test_flip(self):
        N = pair_overlap_operator(ket("00"), ket("10"), 0)
        assert np.allclose(N.matrix, np.outer(ket("1"), ket("0")))

    def test_singlet(self):
        b = (ket("01") - ket("10")) / np.sqrt(2)
        N = pair_overlap_operator(ket("00"), b, 0)
        assert np.allclose(N.matrix, -np.outer(ket("1"), ket("0")) / np.sqrt(2))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            pair_overlap_operator(ket("00"), ket("000"), 0)


class TestBlochDecompose:
    def test_lowering(self):
        n1, n2 = bloch_decompose(np.outer(ket("1"), ket("0")))
        assert np.allclose(n1, [0.5, 0, 0])
        assert np.allclose(n2, [0, -0.5, 0])

    def test_zero(self):
        n1, n2 = bloch_decompose(np.zeros((2, 2)))
        assert not n1.any() and not n2.any()

    def test_hermitian(self):
        n1, n2 = bloch_decompose(np.diag([0.5, -0.5]))
        assert np.allclose(n1, [0, 0, 0.5]) and np.allclose(n2, 0)

    def test_trace_rejected(self):
        with pytest.raises(PreconditionError):
            bloch_decompose(np.eye(2))

    def test_zero_set_on_grid(self, rng):
        a, b = random_unitary(8, rng)[:, :2].T
        N = pair_overlap_operator(a, b, 1)
        n1, n2 = bloch_decompose(N)
        for th in np.linspace(0, np.pi, 19):
            for ph in np.linspace(0, 2 * np.pi, 37):
                r = np.array([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)])
                v = from_bloch(r)
                assert np.vdot(v, N.matrix @ v) == pytest.approx(n1 @ r + 1j * (n2 @ r), abs=1e-12)


class TestProperties:
    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_antipodality(self, seed):
        rng = seeded(seed)
        v = random_qubit(rng)
        assert np.allclose(bloch_vector(perp(v)), -bloch_vector(v), atol=1e-12)
        psi = random_pure(3, rng)
        party = int(rng.integers(3))
        total = collapse(psi, party, v).norm ** 2 + collapse(psi, party, perp(v)).norm ** 2
        assert total == pytest.approx(1, abs=1e-9)

    def test_overlap_identity(self):
        rng = seeded(1)
        worst = 0.0
        for _ in range(1000):
            n = int(rng.integers(2, 5))
            a, b = random_pure(n, rng), random_pure(n, rng)
            party = int(rng.integers(n))
            v = random_qubit(rng)
            N = pair_overlap_operator(a, b, party).matrix
            lhs = np.vdot(v, N @ v)
            rhs = np.vdot(collapse(a, party, v).amplitudes, collapse(b, party, v).amplitudes)
            worst = max(worst, abs(lhs - rhs))
        assert worst <= 1e-10

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(1, 7))
    def test_projector_idempotence(self, seed, dim):
        U = random_unitary(8, seeded(seed))
        S = Subspace(U[:, :dim])
        P = S.projector
        assert np.max(np.abs(P @ P - P)) <= 1e-9
        T = support(P / dim)
        assert np.max(np.abs(T.projector - P)) <= 1e-9

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_collapse_linearity(self, seed):
        rng = seeded(seed)
        a, b = random_pure(3, rng), random_pure(3, rng)
        al, be = complex(*rng.standard_normal(2)), complex(*rng.standard_normal(2))
        v = random_qubit(rng)
        party = int(rng.integers(3))
        lhs = collapse(PureState(al * a.amplitudes + be * b.amplitudes), party, v).amplitudes
        rhs = al * collapse(a, party, v).amplitudes + be * collapse(b, party, v).amplitudes
        assert np.max(np.abs(lhs - rhs)) <= 1e-12
