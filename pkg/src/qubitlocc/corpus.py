"""Named constructions with their expected verdicts.

Each expectation carries a short claim tag describing the fact it encodes, so
a failing check prints what was expected and why.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from .errors import CorpusLookupError, PreconditionError
from .qstate import DensityOperator, PureState, kron, ket
from .statefile import to_state_file
from .upb import UpbAngles, basis_from_unitary, canonical_upb


@dataclass(frozen=True)
class Expectation:
    value: Any
    claim: str


@dataclass
class CorpusEntry:
    name: str
    states: list
    labels: list[str]
    params: dict
    expected: dict[str, Expectation] = field(default_factory=dict)

    @property
    def n_qubits(self) -> int:
        return self.states[0].n_qubits

    def to_state_file(self) -> dict:
        return to_state_file(self.states, self.labels)


def _pure(v) -> PureState:
    v = np.asarray(v, dtype=complex)
    return PureState(v / np.linalg.norm(v))


S2 = 1 / np.sqrt(2)
PLUS = np.array([S2, S2], dtype=complex)
MINUS = np.array([S2, -S2], dtype=complex)
ZERO, ONE = ket("0"), ket("1")


def _ghz(n: int = 3, alpha: complex = S2, beta: complex = S2) -> CorpusEntry:
    if n < 2 or alpha == 0 or beta == 0:
        raise CorpusLookupError("GHZ needs n >= 2 and nonzero alpha, beta")
    psi = _pure(alpha * ket("0" * n) + beta * ket("1" * n))
    return CorpusEntry(
        "GHZ", [psi], ["ghz"], {"n": n, "alpha": alpha, "beta": beta},
        {
            "schmidt_rank_first_qubit": Expectation(2, "GHZ-type state has two Schmidt terms"),
            "orth_schmidt_number": Expectation(2, "spanned by the two orthogonal products"),
        },
    )


def _ghz_triple(n: int = 3, alpha: complex = 0.6, beta: complex = 0.8, seed: int = 0) -> CorpusEntry:
    if n < 2 or alpha == 0 or beta == 0:
        raise CorpusLookupError("GHZ triple needs n >= 2 and nonzero alpha, beta")
    g1 = alpha * ket("0" * n) + beta * ket("1" * n)
    g2 = -np.conj(beta) * ket("0" * n) + np.conj(alpha) * ket("1" * n)
    g1, g2 = g1 / np.linalg.norm(g1), g2 / np.linalg.norm(g2)
    rng = np.random.default_rng(seed)
    w = rng.standard_normal(2**n) + 1j * rng.standard_normal(2**n)
    w -= np.vdot(g1, w) * g1 + np.vdot(g2, w) * g2
    states = [_pure(g1), _pure(g2), _pure(w)]
    return CorpusEntry(
        "GHZ_triple", states, ["ghz1", "ghz2", "other"], {"n": n, "alpha": alpha, "beta": beta, "seed": seed},
        {"decide": Expectation("Indistinguishable", "three states with two GHZ-type members")},
    )


def _w(n: int = 3, coeffs: tuple | None = None) -> CorpusEntry:
    if n < 2:
        raise CorpusLookupError("W needs n >= 2")
    coeffs = tuple(coeffs) if coeffs is not None else (1.0,) * n
    if len(coeffs) != n or any(c == 0 for c in coeffs):
        raise CorpusLookupError("W needs n nonzero coefficients")
    v = sum(c * ket(format(1 << k, f"0{n}b")) for k, c in enumerate(coeffs))
    return CorpusEntry(
        "W", [_pure(v)], ["w"], {"n": n, "coeffs": coeffs},
        {"orth_schmidt_number": Expectation(n, "W-type state needs n orthogonal products")},
    )


def _w_triple(seed: int = 0) -> CorpusEntry:
    from .qstate import random_unitary

    U = random_unitary(3, np.random.default_rng(seed))
    B = np.column_stack([ket("001"), ket("010"), ket("100")]) @ U
    states = [_pure(B[:, k]) for k in range(3)]
    return CorpusEntry(
        "W_triple", states, ["w1", "w2", "w3"], {"seed": seed},
        {
            "decide": Expectation("Indistinguishable", "three 3-qubit W-type states"),
            "schmidt_sum_lower": Expectation(9, "3 + 3 + 3 exceeds 8"),
        },
    )


def _upb3(angles: tuple = (np.pi / 4, np.pi / 3, np.pi / 6)) -> CorpusEntry:
    try:
        a = UpbAngles(*angles)
    except PreconditionError as exc:
        raise CorpusLookupError(str(exc)) from exc
    return CorpusEntry(
        "UPB3", canonical_upb(a), ["S1", "S2", "S3", "S4"], {"angles": tuple(angles)},
        {
            "decide": Expectation("Indistinguishable", "three-qubit UPB is locally indistinguishable"),
            "unextendible": Expectation(True, "complement of a UPB has no product state"),
            "orthonormal_products": Expectation(True, "UPB members are orthonormal products"),
            "products_in_span": Expectation(4, "span of the UPB holds exactly its four members"),
        },
    )


def _upb_case3(angles: tuple = (np.pi / 4, np.pi / 3, np.pi / 6), u1: complex = 0.6, u2: complex = 0.8j) -> CorpusEntry:
    if abs(abs(u1) ** 2 + abs(u2) ** 2 - 1) > 1e-12 or u1 * u2 == 0:
        raise CorpusLookupError("need |u1|^2 + |u2|^2 = 1 with u1 u2 != 0")
    try:
        a = UpbAngles(*angles)
    except PreconditionError as exc:
        raise CorpusLookupError(str(exc)) from exc
    U = np.eye(4, dtype=complex)
    U[2, 2:] = [u1, u2]
    U[3, 2:] = [np.conj(u2), -np.conj(u1)]
    return CorpusEntry(
        "upb_case3", basis_from_unitary(a, U), ["S1", "S2", "mix1", "mix2"], {"angles": tuple(angles), "u1": u1, "u2": u2},
        {"decide": Expectation("Indistinguishable", "basis with two UPB members and two mixtures")},
    )


def _ub_phases(phases) -> np.ndarray:
    th = np.asarray(phases, dtype=float)
    if th.shape != (4,):
        raise CorpusLookupError("need four phases")
    if not (0 <= th[0] <= th[1] <= th[2] <= th[3] < 2 * np.pi):
        raise CorpusLookupError("phases must satisfy 0 <= t1 <= t2 <= t3 <= t4 < 2 pi")
    if abs((th[3] - th[2]) - (th[1] - th[0])) <= 1e-12:
        raise CorpusLookupError("phases must satisfy t4 - t3 != t2 - t1")
    return np.exp(1j * th)


UB_DEFAULT = (0.0, np.pi / 5, np.pi / 3, np.pi / 2)


def ub_states(phases, sign: int = 1, check: bool = True) -> list[PureState]:
    """GHZ-like pairs ``|b> + sign e^{i t_k} |b_bar>`` over four bit strings."""
    e = _ub_phases(phases) if check else np.exp(1j * np.asarray(phases, dtype=float))
    pairs = [("000", "111"), ("001", "110"), ("010", "101"), ("011", "100")]
    return [_pure(ket(a) + sign * ek * ket(b)) for (a, b), ek in zip(pairs, e)]


def _ub1(phases: tuple = UB_DEFAULT) -> CorpusEntry:
    return CorpusEntry(
        "UB1", ub_states(phases, 1), ["Phi1", "Phi2", "Phi3", "Phi4"], {"phases": tuple(phases)},
        {
            "decide": Expectation("Distinguishable", "computational-basis measurements by every party"),
            "unextendible": Expectation(True, "complement has no product state"),
            "orthonormal_products": Expectation(False, "members are entangled"),
        },
    )


def _ub2(phases: tuple = UB_DEFAULT) -> CorpusEntry:
    return CorpusEntry(
        "UB2", ub_states(phases, -1), ["Psi1", "Psi2", "Psi3", "Psi4"], {"phases": tuple(phases)},
        {
            "unextendible": Expectation(True, "complement has no product state"),
            "complement_of": Expectation("UB1", "spans the orthogonal complement of UB1"),
        },
    )


def _s3() -> CorpusEntry:
    states = [_pure(ket("000")), _pure(ket("100") - ket("010")), _pure(ket("100") + ket("010") + ket("001"))]
    return CorpusEntry(
        "S3", states, ["psi1", "psi2", "psi3"], {},
        {"decide": Expectation("Indistinguishable", "three-dimensional locally indistinguishable subspace")},
    )


def _s5() -> CorpusEntry:
    states = [
        _pure(ket("000")),
        _pure(ket("001") - ket("100")),
        _pure(ket("110") - ket("011")),
        _pure(ket("001") + ket("010") + ket("100")),
        _pure(ket("110") + ket("101") + ket("011")),
    ]
    return CorpusEntry(
        "S5", states, [f"psi{k}" for k in range(1, 6)], {},
        {
            "products_in_span": Expectation(1, "unique product state |000> in the span"),
            "schmidt_sum_lower": Expectation(9, "2*4 + 1 = 9 exceeds 8 for any orthonormal basis"),
        },
    )


def _data_hiding_pair() -> CorpusEntry:
    r1 = DensityOperator.mixture([0.5, 0.5], [ket("00"), kron(PLUS, PLUS)])
    r2 = DensityOperator.mixture([0.5, 0.5], [kron(ONE, MINUS), kron(MINUS, ONE)])
    return CorpusEntry(
        "data_hiding_pair", [r1, r2], ["rho1", "rho2"], {},
        {
            "orth_schmidt_number": Expectation((3, 3), "each needs three orthogonal products"),
            "decide": Expectation("Indistinguishable", "Schmidt sum 6 exceeds 4"),
        },
    )


def _rho3(alpha: complex = 0.6, beta: complex = 0.8) -> CorpusEntry:
    if alpha * beta == 0:
        raise CorpusLookupError("rho3 needs alpha * beta != 0")
    r1 = DensityOperator.mixture([0.5, 0.5], [ket("00"), kron(PLUS, PLUS)])
    psi = _pure(alpha * kron(ONE, MINUS) + beta * kron(MINUS, ONE))
    return CorpusEntry(
        "rho3", [r1, psi.to_density()], ["rho1", "rho3"], {"alpha": alpha, "beta": beta},
        {
            "schmidt_sum": Expectation(5, "3 + 2 exceeds 4"),
            "decide": Expectation("Indistinguishable", "Schmidt sum 5 exceeds 4"),
        },
    )


REGISTRY: dict[str, Callable[..., CorpusEntry]] = {
    "GHZ": _ghz,
    "GHZ_triple": _ghz_triple,
    "W": _w,
    "W_triple": _w_triple,
    "UPB3": _upb3,
    "upb_case3": _upb_case3,
    "UB1": _ub1,
    "UB2": _ub2,
    "S3": _s3,
    "S5": _s5,
    "data_hiding_pair": _data_hiding_pair,
    "rho3": _rho3,
}


def corpus_names() -> list[str]:
    return sorted(REGISTRY)


def corpus_get(name: str, **params) -> CorpusEntry:
    try:
        build = REGISTRY[name]
    except KeyError:
        raise CorpusLookupError(f"unknown corpus entry {name!r}; known: {', '.join(corpus_names())}") from None
    try:
        return build(**params)
    except TypeError as exc:
        raise CorpusLookupError(f"bad parameters for {name!r}: {exc}") from exc
