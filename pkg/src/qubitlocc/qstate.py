"""Multi-qubit states, supports, local collapse and pair-overlap operators.

Qubit order is big-endian everywhere: party 0 is the most significant bit of
a computational-basis index, so ``|q0 q1 ... q_{n-1}>`` has index
``q0*2**(n-1) + ... + q_{n-1}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .errors import DimensionError, InvalidStateError, PreconditionError

PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)


def _n_qubits_for(dim: int) -> int:
    n = int(round(np.log2(dim))) if dim > 0 else -1
    if n < 0 or 2**n != dim:
        raise DimensionError(f"dimension {dim} is not a power of two")
    return n


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class PureState:
    """A (possibly unnormalized) state vector on ``n_qubits`` qubits."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        _n_qubits_for(amps.size)
        object.__setattr__(self, "amplitudes", _frozen(amps))

    @property
    def n_qubits(self) -> int:
        return _n_qubits_for(self.amplitudes.size)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "PureState":
        nrm = self.norm
        if nrm == 0:
            raise InvalidStateError("cannot normalize the zero vector")
        return PureState(self.amplitudes / nrm)

    def is_normalized(self, tol: float = DEFAULT_TOL.norm) -> bool:
        return abs(self.norm**2 - 1.0) <= tol

    def to_density(self) -> "DensityOperator":
        a = self.amplitudes
        return DensityOperator(np.outer(a, a.conj()))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.amplitudes, dtype=dtype)

    def __repr__(self):
        return f"PureState(n_qubits={self.n_qubits}, norm={self.norm:.6g})"


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Hermitian positive semidefinite matrix on ``n_qubits`` qubits.

    Unit trace is not enforced here; branch states inside a protocol carry the
    outcome probability as their trace. Use :meth:`check_unit_trace` at roots.
    """

    matrix: np.ndarray
    tol: Tolerances = DEFAULT_TOL

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionError(f"density matrix must be square, got {m.shape}")
        _n_qubits_for(m.shape[0])
        if np.max(np.abs(m - m.conj().T), initial=0.0) > self.tol.herm:
            raise InvalidStateError("matrix is not Hermitian")
        evals = np.linalg.eigvalsh(m)
        if evals.size and evals[0] < -self.tol.norm * max(1.0, np.abs(evals).max()):
            raise InvalidStateError(f"matrix has negative eigenvalue {evals[0]:.3g}")
        object.__setattr__(self, "matrix", _frozen(m))

    @property
    def n_qubits(self) -> int:
        return _n_qubits_for(self.matrix.shape[0])

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def check_unit_trace(self) -> None:
        if abs(self.trace - 1.0) > self.tol.norm:
            raise InvalidStateError(f"trace {self.trace:.12g} is not 1")

    def normalized(self) -> "DensityOperator":
        tr = self.trace
        if tr <= 0:
            raise InvalidStateError("cannot normalize a zero-trace operator")
        return DensityOperator(self.matrix / tr, self.tol)

    @classmethod
    def mixture(cls, weights: Sequence[float], states: Sequence) -> "DensityOperator":
        """``sum_k w_k |psi_k><psi_k|`` with each ``psi_k`` normalized first."""
        dim = np.asarray(states[0]).size
        rho = np.zeros((dim, dim), dtype=complex)
        for w, s in zip(weights, states):
            a = np.asarray(s, dtype=complex).reshape(-1)
            a = a / np.linalg.norm(a)
            rho += w * np.outer(a, a.conj())
        return cls(rho)

    def __repr__(self):
        return f"DensityOperator(n_qubits={self.n_qubits}, trace={self.trace:.6g})"


StateLike = Union[PureState, DensityOperator, np.ndarray]


@dataclass(frozen=True, eq=False)
class Subspace:
    """Ordered orthonormal basis (columns of ``basis``) of a subspace."""

    basis: np.ndarray
    tol: Tolerances = DEFAULT_TOL
    source: np.ndarray | None = None

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=complex)
        if b.ndim == 1:
            b = b[:, None]
        _n_qubits_for(b.shape[0])
        gram = b.conj().T @ b
        if np.max(np.abs(gram - np.eye(b.shape[1])), initial=0.0) > self.tol.orth:
            raise PreconditionError("subspace basis is not orthonormal")
        object.__setattr__(self, "basis", _frozen(b))
        if self.source is not None:
            object.__setattr__(self, "source", _frozen(self.source))

    @classmethod
    def from_vectors(cls, vectors: Sequence, tol: Tolerances = DEFAULT_TOL) -> "Subspace":
        """Orthonormal basis of the span of ``vectors`` (rank-revealing SVD).

        Linearly independent input vectors are kept as ``source`` so that
        searches can refine against the exact span.
        """
        mat = np.column_stack([np.asarray(v, dtype=complex).reshape(-1) for v in vectors])
        u, s, _ = np.linalg.svd(mat, full_matrices=False)
        rank = int(np.sum(s > tol.rank * max(1.0, s.max(initial=0.0))))
        return cls(u[:, :rank], tol, mat if rank == mat.shape[1] else None)

    @property
    def n_qubits(self) -> int:
        return _n_qubits_for(self.basis.shape[0])

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @property
    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.conj().T

    @property
    def vectors(self) -> list[PureState]:
        return [PureState(self.basis[:, k]) for k in range(self.dim)]

    def complement(self) -> "Subspace":
        full = self.basis.shape[0]
        if self.dim == 0:
            return Subspace(np.eye(full, dtype=complex), self.tol)
        u, _, _ = np.linalg.svd(self.basis, full_matrices=True)
        return Subspace(u[:, self.dim :], self.tol)

    def residual(self, psi) -> float:
        """``||(I - P)|psi>||``."""
        a = np.asarray(psi, dtype=complex).reshape(-1)
        return float(np.linalg.norm(a - self.basis @ (self.basis.conj().T @ a)))

    def contains(self, psi, tol: float | None = None) -> bool:
        return self.residual(psi) <= (self.tol.orth if tol is None else tol)

    def __repr__(self):
        return f"Subspace(n_qubits={self.n_qubits}, dim={self.dim})"


@dataclass(frozen=True, eq=False)
class PairOverlapOperator:
    """``N = Tr_{others}(|b><a|)`` so that ``<v|N|v> = <a_v|b_v>`` after collapse."""

    party: int
    matrix: np.ndarray


# ---------------------------------------------------------------------------
# conversions


def as_state(x: StateLike) -> PureState | DensityOperator:
    if isinstance(x, (PureState, DensityOperator)):
        return x
    a = np.asarray(x, dtype=complex)
    if a.ndim == 1:
        return PureState(a)
    if a.ndim == 2 and a.shape[0] == a.shape[1] and a.shape[0] > 1:
        return DensityOperator(a)
    raise InvalidStateError(f"cannot interpret array of shape {a.shape} as a state")


def as_density(x: StateLike) -> DensityOperator:
    s = as_state(x)
    return s.to_density() if isinstance(s, PureState) else s


def factor(x: StateLike, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Matrix ``F`` with ``rho = F F^dagger``; columns span the support.

    Pure states give their amplitude column. Mixed states give eigenvectors
    scaled by ``sqrt(eigenvalue)`` for eigenvalues above ``tol.rank``.
    """
    s = as_state(x)
    if isinstance(s, PureState):
        return s.amplitudes.reshape(-1, 1).copy()
    evals, evecs = np.linalg.eigh(s.matrix)
    keep = evals > tol.rank * max(1.0, evals.max(initial=0.0))
    return evecs[:, keep] * np.sqrt(evals[keep])


# ---------------------------------------------------------------------------
# single-qubit helpers


def bloch_vector(v) -> np.ndarray:
    """Bloch vector ``r`` of a single-qubit state (normalized internally)."""
    a = np.asarray(v, dtype=complex).reshape(2)
    a = a / np.linalg.norm(a)
    return np.real(np.einsum("i,aij,j->a", a.conj(), PAULI, a))


def from_bloch(r) -> np.ndarray:
    """Unit qubit vector with Bloch vector ``r`` (fixed gauge: first amplitude real >= 0)."""
    r = np.asarray(r, dtype=float)
    r = r / np.linalg.norm(r)
    theta = np.arccos(np.clip(r[2], -1.0, 1.0))
    phi = np.arctan2(r[1], r[0])
    return np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)])


def perp(v) -> np.ndarray:
    """The orthogonal complement ``(-conj(v1), conj(v0))`` of a qubit vector."""
    a = np.asarray(v, dtype=complex).reshape(2)
    return np.array([-a[1].conjugate(), a[0].conjugate()])


def qubit(theta: float) -> np.ndarray:
    """``cos(theta)|0> + sin(theta)|1>``."""
    return np.array([np.cos(theta), np.sin(theta)], dtype=complex)


def ket(bits: str) -> np.ndarray:
    """Computational-basis vector, e.g. ``ket("010")``."""
    out = np.zeros(2 ** len(bits), dtype=complex)
    out[int(bits, 2)] = 1.0
    return out


def kron(*vectors) -> np.ndarray:
    out = np.ones(1, dtype=complex)
    for v in vectors:
        out = np.kron(out, np.asarray(v, dtype=complex).reshape(-1))
    return out


# ---------------------------------------------------------------------------
# core operations


def support(rho: StateLike, tol_rank: float = DEFAULT_TOL.rank) -> Subspace:
    """Orthonormal eigenvectors of ``rho`` with eigenvalue above ``tol_rank``."""
    s = as_state(rho)
    if isinstance(s, PureState):
        return Subspace(s.normalized().amplitudes[:, None])
    evals, evecs = np.linalg.eigh(s.matrix)
    keep = evals > tol_rank
    return Subspace(evecs[:, keep][:, ::-1])


def support_contains(rho: StateLike, psi, tol: float = 1e-9) -> bool:
    return support(rho).residual(psi) <= tol


def _move_party_first(arr: np.ndarray, n: int, party: int) -> np.ndarray:
    """Reshape a (2**n, ...) array to (2, 2**(n-1), ...) with ``party`` leading."""
    trailing = arr.shape[1:]
    t = arr.reshape((2,) * n + trailing)
    t = np.moveaxis(t, party, 0)
    return t.reshape((2, 2 ** (n - 1)) + trailing)


def collapse_array(arr: np.ndarray, n: int, party: int, v) -> np.ndarray:
    """``(<v| (x) I) arr`` on the row index of a (2**n, ...) array."""
    v = np.asarray(v, dtype=complex).reshape(2)
    t = _move_party_first(arr, n, party)
    return np.tensordot(v.conj(), t, axes=(0, 0))


def _check_party(n: int, party: int) -> None:
    if not 0 <= party < n:
        raise IndexError(f"party {party} out of range for {n} qubits")


def collapse(state: StateLike, party: int, v) -> PureState | DensityOperator:
    """Project ``party`` onto ``|v>`` and drop it; the result is unnormalized.

    For a normalized input, the squared norm (pure) or trace (mixed) of the
    result is the probability of the outcome ``v``.
    """
    s = as_state(state)
    n = s.n_qubits
    _check_party(n, party)
    if isinstance(s, PureState):
        return PureState(collapse_array(s.amplitudes, n, party, v))
    v = np.asarray(v, dtype=complex).reshape(2)
    left = collapse_array(s.matrix, n, party, v)
    both = collapse_array(left.conj().T, n, party, v).conj().T
    return DensityOperator((both + both.conj().T) / 2, s.tol)


def pair_overlap_operator(a: StateLike, b: StateLike, party: int) -> PairOverlapOperator:
    a = as_state(a)
    b = as_state(b)
    if not (isinstance(a, PureState) and isinstance(b, PureState)):
        raise InvalidStateError("pair overlap operators are defined for pure states")
    if a.n_qubits != b.n_qubits:
        raise DimensionError("states live on different numbers of qubits")
    n = a.n_qubits
    _check_party(n, party)
    return PairOverlapOperator(party, overlap_matrix(a.amplitudes, b.amplitudes, n, party))


def overlap_matrix(a: np.ndarray, b: np.ndarray, n: int, party: int) -> np.ndarray:
    ta = _move_party_first(a, n, party)
    tb = _move_party_first(b, n, party)
    return tb @ ta.conj().T


def bloch_decompose(
    N: PairOverlapOperator | np.ndarray, tol_orth: float = DEFAULT_TOL.orth
) -> tuple[np.ndarray, np.ndarray]:
    """Pauli vectors ``n1, n2`` with ``<v|N|v> = n1.r + i n2.r`` for traceless ``N``."""
    m = N.matrix if isinstance(N, PairOverlapOperator) else np.asarray(N, dtype=complex)
    if abs(np.trace(m)) > tol_orth:
        raise PreconditionError(f"overlap operator has trace {abs(np.trace(m)):.3g}")
    h1 = (m + m.conj().T) / 2
    h2 = (m - m.conj().T) / 2j
    n1 = np.real(np.einsum("aij,ji->a", PAULI, h1)) / 2
    n2 = np.real(np.einsum("aij,ji->a", PAULI, h2)) / 2
    return n1, n2


def supports_orthogonal(a: StateLike, b: StateLike, tol: float = DEFAULT_TOL.orth) -> bool:
    """``||P_a P_b||_max <= tol`` on the support projectors."""
    pa = support(a).projector
    pb = support(b).projector
    return float(np.max(np.abs(pa @ pb))) <= tol


def reduced(state: StateLike, keep: Sequence[int]) -> np.ndarray:
    """Reduced density matrix on the qubits in ``keep`` (in the given order)."""
    s = as_state(state)
    n = s.n_qubits
    f = factor(s)
    keep = list(keep)
    rest = [q for q in range(n) if q not in keep]
    t = f.reshape((2,) * n + (f.shape[1],))
    t = np.transpose(t, keep + rest + [n]).reshape(2 ** len(keep), -1)
    return t @ t.conj().T


# ---------------------------------------------------------------------------
# random instances


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary from a complex Gaussian matrix and QR with phase fix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_pure(n_qubits: int, rng: np.random.Generator) -> PureState:
    a = rng.standard_normal(2**n_qubits) + 1j * rng.standard_normal(2**n_qubits)
    return PureState(a / np.linalg.norm(a))


def random_orthonormal(n_qubits: int, count: int, rng: np.random.Generator) -> list[PureState]:
    u = random_unitary(2**n_qubits, rng)
    return [PureState(u[:, k]) for k in range(count)]
