"""The canonical three-qubit UPB and the algebra behind its local indistinguishability.

Conventions: ``|X> = c|0> + s|1>`` and ``|X_perp> = s|0> - c|1>`` for
``X in {A, B, C}`` with angles ``theta_1..3``.  The four members are

    S1 = |0 0 0>,  S2 = |1 B C>,  S3 = |A 1 C_perp>,  S4 = |A_perp B_perp 1>.

After Alice measures ``{psi, psi_perp}`` the Bob-Charlie vectors of the
members are ``|00>, |BC>, |1C_perp>, |B_perp 1>``; most helpers below work
on that two-qubit product set.  The ratios are

    r = <psi_perp|0> / <psi|0>,   s = <psi_perp|A> / <psi|A>,

with ``psi = sqrt(p)|0> + e^{i alpha} sqrt(1-p)|1>`` and
``psi_perp = sqrt(1-p)|0> - e^{i alpha} sqrt(p)|1>``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .config import RunConfig
from .errors import DomainError, IllConditionedError, PreconditionError
from .qstate import PureState, kron, random_unitary

ZERO = np.array([1.0, 0.0], dtype=complex)
ONE = np.array([0.0, 1.0], dtype=complex)


@dataclass(frozen=True)
class UpbAngles:
    theta1: float
    theta2: float
    theta3: float
    strict: bool = field(default=True, compare=False)

    def __post_init__(self):
        if self.strict:
            self.require_open()

    def require_open(self) -> None:
        for t in (self.theta1, self.theta2, self.theta3):
            if not 0 < t < np.pi / 2:
                raise PreconditionError(f"angle {t} outside the open interval (0, pi/2)")

    @classmethod
    def closed(cls, theta1: float, theta2: float, theta3: float) -> "UpbAngles":
        """Angles allowed on the boundary, for evaluating closed-form formulas."""
        return cls(theta1, theta2, theta3, strict=False)

    @property
    def thetas(self) -> tuple[float, float, float]:
        return (self.theta1, self.theta2, self.theta3)

    @property
    def c(self) -> np.ndarray:
        return np.cos(self.thetas)

    @property
    def s(self) -> np.ndarray:
        return np.sin(self.thetas)

    @property
    def t1(self) -> float:
        return float(np.tan(self.theta1))

    def vec(self, k: int) -> np.ndarray:
        """``|A>, |B>, |C>`` for ``k = 0, 1, 2``."""
        return np.array([self.c[k], self.s[k]], dtype=complex)

    def vec_perp(self, k: int) -> np.ndarray:
        return np.array([self.s[k], -self.c[k]], dtype=complex)


def canonical_upb(angles: UpbAngles) -> list[PureState]:
    angles.require_open()
    A, B, C = (angles.vec(k) for k in range(3))
    Ap, Bp, Cp = (angles.vec_perp(k) for k in range(3))
    return [
        PureState(kron(ZERO, ZERO, ZERO)),
        PureState(kron(ONE, B, C)),
        PureState(kron(A, ONE, Cp)),
        PureState(kron(Ap, Bp, ONE)),
    ]


def bc_products(angles: UpbAngles) -> list[np.ndarray]:
    """``|00>, |BC>, |1 C_perp>, |B_perp 1>`` on Bob and Charlie."""
    B, C = angles.vec(1), angles.vec(2)
    Bp, Cp = angles.vec_perp(1), angles.vec_perp(2)
    return [kron(ZERO, ZERO), kron(B, C), kron(ONE, Cp), kron(Bp, ONE)]


def basis_from_unitary(angles: UpbAngles, U: np.ndarray) -> list[PureState]:
    """``Phi_k = sum_j U[k, j] S_j``."""
    S = np.column_stack([np.asarray(s) for s in canonical_upb(angles)])
    U = np.asarray(U, dtype=complex)
    return [PureState(S @ U[k]) for k in range(U.shape[0])]


# ---------------------------------------------------------------------------
# reciprocal basis and the operator M


def reciprocal_basis(states: Sequence, max_cond: float = 1e8) -> list[PureState]:
    """Duals ``d_i`` in the span with ``<d_i|s_j> = delta_ij``."""
    S = np.column_stack([np.asarray(s, dtype=complex).reshape(-1) for s in states])
    sv = np.linalg.svd(S, compute_uv=False)
    if sv[-1] == 0 or sv[0] / sv[-1] > max_cond:
        raise IllConditionedError("states are (nearly) linearly dependent")
    D = S @ np.linalg.inv(S.conj().T @ S)
    return [PureState(D[:, i]) for i in range(D.shape[1])]


def eigenvalues_of_M(r: complex, s: complex) -> np.ndarray:
    if r == 0 or s == 0:
        raise PreconditionError("r and s must be nonzero")
    return np.array([r, -1 / np.conj(r), s, -1 / np.conj(s)])


def build_M(record: "AnalysisRecord", angles: UpbAngles) -> np.ndarray:
    """The Bob-Charlie operator mapping each ``|ab_k>`` to ``(beta_k/alpha_k)|cd_k>``.

    Built from the product set and its reciprocal basis, so the four product
    vectors are its eigenvectors with eigenvalues ``r, -1/r*, s, -1/s*``.
    """
    lam = eigenvalues_of_M(record.r, record.s)
    vecs = bc_products(angles)
    duals = [np.asarray(d) for d in reciprocal_basis(vecs)]
    M = np.zeros((4, 4), dtype=complex)
    for l, v, d in zip(lam, vecs, duals):
        M += l * np.outer(v, d.conj()) / np.vdot(d, v)
    return M


# ---------------------------------------------------------------------------
# spectra of the conditional operators


def rho1(p: float, angles: UpbAngles) -> np.ndarray:
    v = bc_products(angles)
    return p * np.outer(v[0], v[0].conj()) + (1 - p) * np.outer(v[1], v[1].conj())


def rho2(q: float, angles: UpbAngles) -> np.ndarray:
    v = bc_products(angles)
    return q * np.outer(v[2], v[2].conj()) + (1 - q) * np.outer(v[3], v[3].conj())


def conditional_operator(psi, angles: UpbAngles) -> np.ndarray:
    """``(<psi| (x) I) P (|psi> (x) I)`` with ``P`` the projector onto span(UPB)."""
    psi = np.asarray(psi, dtype=complex).reshape(2)
    S = np.column_stack([np.asarray(s) for s in canonical_upb(angles)])
    T = np.tensordot(psi.conj(), S.reshape(2, 4, 4), axes=(0, 0))  # (4, members)
    return T @ T.conj().T


def lambda_of_p(p: float, angles: UpbAngles) -> float:
    """Larger eigenvalue of ``rho1(p)`` in closed form."""
    if not 0 <= p <= 1:
        raise DomainError(f"p={p} outside [0, 1]")
    c2, c3 = angles.c[1], angles.c[2]
    return float((1 + np.sqrt(1 - 4 * p * (1 - p) * (1 - c2**2 * c3**2))) / 2)


def p_from_r(r: float) -> float:
    return 1 / (1 + r * r)


def _real_quadratic_roots(b: float, c: float) -> tuple[float, float]:
    """Roots of ``z^2 + b z + c`` with ``c < 0`` (always real, opposite signs)."""
    disc = np.sqrt(b * b - 4 * c)
    # avoid cancellation: compute the larger-magnitude root first
    big = (-b - disc) / 2 if b > 0 else (-b + disc) / 2
    small = c / big
    return tuple(sorted((float(big), float(small))))


def mu_roots(r: float, angles: UpbAngles) -> tuple[float, float]:
    """Both ``mu`` with ``mu|00> + |BC>`` an eigenvector of ``rho1(1/(1+r^2))``."""
    if r == 0:
        raise DomainError("r must be nonzero")
    c2, c3 = angles.c[1], angles.c[2]
    return _real_quadratic_roots(-(1 - r * r) / (r * r * c2 * c3), -1 / (r * r))


def mu_polynomial(mu: float, r: float, angles: UpbAngles) -> float:
    c2, c3 = angles.c[1], angles.c[2]
    return mu * mu - mu * (1 - r * r) / (r * r * c2 * c3) - 1 / (r * r)


def x_roots(mu: float, angles: UpbAngles) -> tuple[float, float]:
    """Both ``x`` making ``x(mu|00>+|BC>) + mu|1C_perp> + |B_perp 1>`` product."""
    if mu == 0:
        raise DomainError("mu must be nonzero")
    c2, c3 = angles.c[1], angles.c[2]
    s2, s3 = angles.s[1], angles.s[2]
    return _real_quadratic_roots(-((1 + mu * mu) * c3 + 2 * mu * c2) / (mu * s2 * s3), -1.0)


def ab_vector(x: float, mu: float, angles: UpbAngles) -> np.ndarray:
    """``x(mu|00> + |BC>) + (mu|1C_perp> + |B_perp 1>)`` in the computational basis."""
    v = bc_products(angles)
    return x * (mu * v[0] + v[1]) + (mu * v[2] + v[3])


def product_determinant(v: np.ndarray) -> complex:
    """``v00 v11 - v01 v10``; zero exactly for product two-qubit vectors."""
    v = np.asarray(v).reshape(2, 2)
    return complex(v[0, 0] * v[1, 1] - v[0, 1] * v[1, 0])


def impossibility_gap(r: float, angles: UpbAngles) -> float:
    """``((1-r^2)/r)^2 + 4 c2^2``: the two sides of the final contradiction differ by this."""
    if r == 0:
        raise DomainError("r must be nonzero")
    c2 = angles.c[1]
    return float(((1 - r * r) / r) ** 2 + 4 * c2 * c2)


# ---------------------------------------------------------------------------
# measurement ratios


def measurement_vectors(p: float, alpha: float) -> tuple[np.ndarray, np.ndarray]:
    psi = np.array([np.sqrt(p), np.exp(1j * alpha) * np.sqrt(1 - p)])
    psi_perp = np.array([np.sqrt(1 - p), -np.exp(1j * alpha) * np.sqrt(p)])
    return psi, psi_perp


def ratios(p: float, alpha: float, angles: UpbAngles) -> tuple[complex, complex]:
    """``(r, s)`` computed directly from the measurement vectors."""
    psi, psi_perp = measurement_vectors(p, alpha)
    A = angles.vec(0)
    r = np.vdot(psi_perp, ZERO) / np.vdot(psi, ZERO)
    s = np.vdot(psi_perp, A) / np.vdot(psi, A)
    return complex(r), complex(s)


def s_closed_form(r: float, alpha: float, angles: UpbAngles) -> complex:
    e = np.exp(-1j * alpha)
    return complex((r - angles.t1 * e) / (1 + r * angles.t1 * e))


def phase_from_r(r: float, angles: UpbAngles) -> complex:
    """``e^{i alpha}`` forced by ``s = -r``."""
    return complex((1 - r * r) * angles.t1 / (2 * r))


@dataclass
class AnalysisRecord:
    """Symbols of the case analysis; unset fields are ``None``."""

    r: complex
    s: complex
    p: float | None = None
    q: float | None = None
    lam: float | None = None
    mu: float | None = None
    mu_prime: float | None = None
    x: float | None = None
    y: float | None = None
    xi: complex | None = None
    alpha: float | None = None

    def check(self, tol: float = 1e-9) -> dict[str, bool]:
        """Evaluate the recorded relations that are populated."""
        out = {}
        if self.mu is not None and self.mu_prime is not None:
            out["mu_prime"] = bool(abs(self.mu_prime + abs(self.r) ** 2 * self.mu) <= tol * max(1, abs(self.mu)))
        if self.xi is not None:
            out["xi"] = bool(abs(self.xi + 1 / np.conj(self.s)) <= tol * max(1, abs(self.xi)))
        if self.p is not None:
            out["r_from_p"] = bool(abs(abs(self.r) ** 2 - (1 - self.p) / self.p) <= tol * max(1, abs(self.r) ** 2))
        return out

    @property
    def consistent(self) -> bool:
        return all(self.check().values())


def analysis_record(p: float, alpha: float, angles: UpbAngles) -> AnalysisRecord:
    """Populate the record for a measurement ``psi(p, alpha)`` by Alice."""
    if not 0 < p < 1:
        raise DomainError("p must lie strictly between 0 and 1")
    r, s = ratios(p, alpha, angles)
    psi, _ = measurement_vectors(p, alpha)
    q = float(abs(np.vdot(psi, angles.vec(0))) ** 2)
    rr = r.real
    mu = mu_roots(rr, angles)[1]
    mu_prime = -abs(r) ** 2 * mu
    x = x_roots(mu, angles)[1]
    return AnalysisRecord(r, s, p, q, lambda_of_p(p, angles), mu, mu_prime, x, None, -1 / np.conj(s), alpha)


# ---------------------------------------------------------------------------
# basis scan


@dataclass
class ScanReport:
    angles: tuple[float, float, float]
    trials: int
    seed: int
    counts: dict[str, int]
    caveated_inconclusive: int
    verdicts: list[str] = field(default_factory=list)

    @property
    def distinguishable(self) -> int:
        return self.counts.get("Distinguishable", 0)


def basis_scan(angles: UpbAngles, trials: int, seed: int = 0, cfg: RunConfig | None = None) -> ScanReport:
    """Run the protocol search on Haar-random orthonormal bases of span(UPB)."""
    from .lpmcc import decide

    if trials < 1:
        raise PreconditionError("trials must be at least 1")
    cfg = cfg or RunConfig()
    verdicts = []
    caveat = 0
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        U = random_unitary(4, rng)
        dec = decide(basis_from_unitary(angles, U), cfg=cfg)
        verdicts.append(dec.verdict)
        if dec.verdict == "Inconclusive" and dec.sampled_family:
            caveat += 1
    return ScanReport(angles.thetas, trials, seed, dict(Counter(verdicts)), caveat, verdicts)
