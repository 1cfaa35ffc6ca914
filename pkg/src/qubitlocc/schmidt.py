"""Schmidt ranks, orthogonal Schmidt numbers and the Schmidt-sum criterion.

The orthogonal Schmidt number of a state is the least number of pairwise
orthogonal product vectors whose span contains its support.  There is no
closed formula, so everything here is a pair of certified bounds:

* lower bounds come from support dimension, Schmidt ranks across every
  bipartite cut, an exact test for "at most two" on pure states, and an
  exclusion of ``m = dim(support)`` when the support has no orthonormal
  product basis;
* upper bounds come from an explicit witness, found either by a recursive
  search over measurement-tree product bases or by least-squares descent over
  sets of product vectors, and are always re-verified.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import least_squares

from .config import DEFAULT_TOL, RunConfig, Tolerances
from .errors import InvalidCutError, PreconditionError, UnsupportedSizeError
from .prodfind import (
    fubini_study,
    gauge_vector,
    is_product,
    pencil_product_points,
    product_states_in_subspace,
)
from .qstate import (
    PureState,
    StateLike,
    Subspace,
    _move_party_first,
    as_state,
    collapse_array,
    factor,
    kron,
    perp,
    supports_orthogonal,
)


@dataclass(frozen=True, eq=False)
class SchmidtBounds:
    lower: int
    upper: int
    exact: bool
    witness_upper: list[np.ndarray] | None = None
    inconclusive: bool = False
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError(f"lower bound {self.lower} exceeds upper bound {self.upper}")
        if self.exact and self.lower != self.upper:
            raise ValueError("exact bounds must coincide")


# ---------------------------------------------------------------------------
# Schmidt ranks


def _cut_matrix(a: np.ndarray, n: int, cut: Sequence[int]) -> np.ndarray:
    rest = [q for q in range(n) if q not in cut]
    t = a.reshape((2,) * n)
    return np.transpose(t, list(cut) + rest).reshape(2 ** len(cut), -1)


def _numerical_rank(m: np.ndarray, tol: float) -> int:
    s = np.linalg.svd(m, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > tol * max(1.0, s[0])))


def schmidt_rank(psi, cut: Sequence[int], tol_rank: float = DEFAULT_TOL.rank) -> int:
    """Number of Schmidt coefficients of ``psi`` across ``cut | complement``."""
    a = np.asarray(psi, dtype=complex).reshape(-1)
    n = int(round(np.log2(a.size)))
    cut = sorted(set(int(q) for q in cut))
    if not cut or len(cut) >= n or cut[0] < 0 or cut[-1] >= n:
        raise InvalidCutError(f"cut {cut} is not a proper nonempty subset of {n} qubits")
    return _numerical_rank(_cut_matrix(a / np.linalg.norm(a), n, cut), tol_rank)


def bipartite_cuts(n: int) -> list[tuple[int, ...]]:
    """One representative (containing qubit 0) of every bipartition."""
    out = []
    for size in range(1, n):
        for cut in itertools.combinations(range(n), size):
            if 0 in cut:
                out.append(cut)
    return out


def max_cut_rank(psi, tol_rank: float = DEFAULT_TOL.rank) -> int:
    a = np.asarray(psi, dtype=complex).reshape(-1)
    n = int(round(np.log2(a.size)))
    if n < 2:
        return 1
    return max(schmidt_rank(a, cut, tol_rank) for cut in bipartite_cuts(n))


# ---------------------------------------------------------------------------
# lower bounds


def at_most_two(psi, tol: float = 1e-9) -> bool:
    """Exact test of whether a pure state lies in the span of two orthogonal products.

    Two orthogonal product vectors differ orthogonally on some qubit ``j``, so
    the state splits as ``|x>|c0> + |x_perp>|c1>`` with ``c0, c1`` product.
    The directions ``x`` making one branch product solve a pencil of minor
    quadratics; at most two per qubit unless the whole pencil is product.
    """
    a = np.asarray(psi, dtype=complex).reshape(-1)
    n = int(round(np.log2(a.size)))
    a = a / np.linalg.norm(a)
    if n <= 1 or is_product(a, tol) is not None:
        return True
    for j in range(n):
        rows = _move_party_first(a, n, j)
        pts = pencil_product_points(rows[0], rows[1], n - 1, tol)
        if pts is None:
            return True
        for z in pts:
            x = np.conj(z)
            x = x / np.linalg.norm(x)
            other = collapse_array(a, n, j, perp(x))
            if np.linalg.norm(other) <= tol or is_product(other, 1e-7) is not None:
                return True
    return False


def _support_basis(F: np.ndarray, tol_rank: float) -> np.ndarray:
    u, s, _ = np.linalg.svd(F, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return u[:, :0]
    return u[:, : int(np.sum(s > tol_rank * max(1.0, s[0])))]


def _generic_vectors(B: np.ndarray, count: int = 3) -> list[np.ndarray]:
    rng = np.random.default_rng(12345)
    out = [B[:, k] for k in range(B.shape[1])]
    for _ in range(count if B.shape[1] > 1 else 0):
        c = rng.standard_normal(B.shape[1]) + 1j * rng.standard_normal(B.shape[1])
        out.append(B @ c / np.linalg.norm(c))
    return out


def _has_orthonormal_product_basis_2d(B: np.ndarray, n: int) -> bool:
    pts = pencil_product_points(B[:, 0], B[:, 1], n)
    if pts is None:
        # Every member is product, so the span is |a>(x)span{..} on one qubit
        # (or on a fixed rest); an orthonormal product basis exists.
        return True
    vecs = [gauge_vector(z[0] * B[:, 0] + z[1] * B[:, 1]) for z in pts]
    return len(vecs) == 2 and abs(np.vdot(vecs[0], vecs[1])) <= 1e-8


def _orthonormal_product_basis_excluded(B: np.ndarray, n: int, cfg: RunConfig) -> bool | None:
    """True when the support certainly has no orthonormal product basis.

    Returns ``None`` when the product search cannot decide (continuous
    families or low completeness).
    """
    d = B.shape[1]
    if d == 1:
        return is_product(B[:, 0], cfg.tol.prod) is None
    if d == 2:
        return not _has_orthonormal_product_basis_2d(B, n)
    if d == 2**n:
        return False
    found = product_states_in_subspace(Subspace(B, cfg.tol), cfg, restarts=min(cfg.restarts, 256))
    if found.completeness != "high":
        return None
    vecs = [h.vector for h in found.hits]
    if len(vecs) < d:
        return True
    orth = [[abs(np.vdot(u, v)) <= 1e-7 for v in vecs] for u in vecs]
    for combo in itertools.combinations(range(len(vecs)), d):
        if all(orth[i][j] for i, j in itertools.combinations(combo, 2)):
            return False
    return True


def lower_bound(state: StateLike, cfg: RunConfig | None = None, *, full: bool = True) -> tuple[int, list[str]]:
    """Certified lower bound on the orthogonal Schmidt number, with reasons.

    ``full=False`` skips the product-search exclusion for supports of
    dimension three or more (used inside the protocol search).
    """
    cfg = cfg or RunConfig()
    F = factor(state, cfg.tol)
    return _lower_from_factor(F, cfg, full)


def _lower_from_factor(F: np.ndarray, cfg: RunConfig, full: bool) -> tuple[int, list[str]]:
    n = int(round(np.log2(F.shape[0])))
    B = _support_basis(F, cfg.tol.rank)
    d = B.shape[1]
    if d == 0:
        return 0, ["state vanishes"]
    reasons = [f"support dimension {d}"]
    lower = d
    ranks = max(max_cut_rank(v, cfg.tol.rank) for v in _generic_vectors(B))
    if ranks > lower:
        lower = ranks
        reasons.append(f"Schmidt rank {ranks} across a bipartite cut")
    if d == 1 and lower <= 2 and n >= 3 and not at_most_two(B[:, 0]):
        lower = 3
        reasons.append("no splitting into two orthogonal product terms")
    if lower == d and d < 2**n and (full or d <= 2):
        excluded = _orthonormal_product_basis_excluded(B, n, cfg)
        if excluded:
            lower = d + 1
            reasons.append("support has no orthonormal product basis")
    return lower, reasons


# ---------------------------------------------------------------------------
# upper bounds: product bases generated by local measurement trees


def _qubit_candidates(F: np.ndarray, m: int, j: int) -> list[np.ndarray]:
    """Measurement directions worth trying on qubit ``j`` of a branch."""
    cands = [np.array([1, 0], dtype=complex)]
    t = _move_party_first(F, m, j)  # (2, rest, k)
    mats = [t.reshape(2, -1)] + [t[:, :, c] for c in range(t.shape[2])]
    for mat in mats:
        rho = mat @ mat.conj().T
        _, vecs = np.linalg.eigh(rho)
        cands.append(vecs[:, 0])
    B = _support_basis(F, 1e-8)
    prods = []
    if B.shape[1] == 2 and m >= 2:
        pts = pencil_product_points(B[:, 0], B[:, 1], m)
        if pts:
            prods = [z[0] * B[:, 0] + z[1] * B[:, 1] for z in pts]
    prods += [B[:, c] for c in range(B.shape[1])]
    for p in prods:
        fac = is_product(p, 1e-8)
        if fac is not None:
            cands.append(fac[j])
    out: list[np.ndarray] = []
    for v in cands:
        v = v / np.linalg.norm(v)
        if all(min(fubini_study(v, w), fubini_study(perp(v), w)) > 1e-7 for w in out):
            out.append(v)
    return out


def _tree_search(F: np.ndarray, m: int, best: int, tol: float) -> tuple[int, list[list[np.ndarray]]] | None:
    """Cheapest tree product basis covering ``span(F)``, if cheaper than ``best``."""
    if np.linalg.norm(F) <= tol:
        return 0, []
    d = _support_basis(F, 1e-8).shape[1]
    if d >= best:
        return None
    if m == 0:
        return 1, [[]]
    if d == 2**m:
        prods = [[np.eye(2, dtype=complex)[int(b)] for b in format(i, f"0{m}b")] for i in range(2**m)]
        return d, prods
    found = None
    for j in range(m):
        for v in _qubit_candidates(F, m, j):
            halves = []
            budget = best
            for w in (v, perp(v)):
                child = collapse_array(F, m, j, w)
                lb = _support_basis(child, 1e-8).shape[1] if np.linalg.norm(child) > tol else 0
                halves.append((w, child, lb))
            if halves[0][2] + halves[1][2] >= best:
                continue
            total = 0
            parts = []
            ok = True
            for idx, (w, child, lb) in enumerate(halves):
                other_lb = halves[1 - idx][2] if idx == 0 else 0
                res = _tree_search(child, m - 1, budget - total - other_lb, tol)
                if res is None:
                    ok = False
                    break
                total += res[0]
                parts += [p[:j] + [w] + p[j:] for p in res[1]]
            if ok and total < best:
                best, found = total, (total, parts)
                if best == d:
                    return found
    return found


# ---------------------------------------------------------------------------
# upper bounds: least squares over sets of product vectors


def _products_from_params(x: np.ndarray, m: int, n: int) -> np.ndarray:
    c = (x[: 2 * m * n] + 1j * x[2 * m * n :]).reshape(m, n, 2)
    c = c / np.linalg.norm(c, axis=2, keepdims=True)
    vecs = []
    for i in range(m):
        vecs.append(kron(*c[i]))
    return np.array(vecs).T  # (2**n, m)


def _lsq_residual(x, m, n, B):
    P = _products_from_params(x, m, n)
    r1 = B - P @ (P.conj().T @ B)
    G = P.conj().T @ P
    iu = np.triu_indices(m, 1)
    r2 = G[iu]
    r = np.concatenate([r1.ravel(), r2])
    return np.concatenate([r.real, r.imag])


def _lsq_witness(B: np.ndarray, m: int, n: int, restarts: int, seed: int) -> list[np.ndarray] | None:
    rng = np.random.default_rng(seed)
    best = None
    n_res = 2 * (B.size + m * (m - 1) // 2)
    # Levenberg-Marquardt needs at least as many residuals as parameters
    method = "lm" if n_res >= 4 * m * n else "trf"
    for _ in range(restarts):
        x0 = rng.standard_normal(4 * m * n)
        sol = least_squares(
            _lsq_residual, x0, args=(m, n, B), method=method, xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=4000
        )
        if best is None or sol.cost < best.cost:
            best = sol
        if sol.cost < 1e-24:
            break
    if best is None or best.cost > 1e-20:
        return None
    P = _products_from_params(best.x, m, n)
    return [P[:, i] for i in range(m)]


def witness_valid(witness: Sequence[np.ndarray], B: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> bool:
    """Orthogonal, product, and spanning the support (projector residual)."""
    W = np.column_stack([np.asarray(w, dtype=complex).reshape(-1) for w in witness])
    W = W / np.linalg.norm(W, axis=0)
    if np.max(np.abs(W.conj().T @ W - np.eye(W.shape[1]))) > tol.orth:
        return False
    if any(is_product(W[:, i], tol.prod) is None for i in range(W.shape[1])):
        return False
    res = B - W @ (W.conj().T @ B)
    return float(np.max(np.abs(res), initial=0.0)) <= tol.orth


def orth_schmidt_number(
    state: StateLike, m_max: int | None = None, cfg: RunConfig | None = None
) -> SchmidtBounds:
    """Certified bounds on the orthogonal Schmidt number of ``state``."""
    cfg = cfg or RunConfig()
    s = as_state(state)
    n = s.n_qubits
    if n > 4:
        raise UnsupportedSizeError("orthogonal Schmidt numbers are supported up to 4 qubits")
    F = factor(s, cfg.tol)
    B = _support_basis(F, cfg.tol.rank)
    d = B.shape[1]
    if m_max is None:
        m_max = 2**n
    if m_max < d:
        raise PreconditionError(f"m_max={m_max} is below the support dimension {d}")
    lower, reasons = _lower_from_factor(F, cfg, full=True)

    witness = None
    tree = _tree_search(B, n, 2**n + 1, 1e-12)
    if tree is not None:
        witness = [kron(*p) for p in tree[1]]
        if not witness_valid(witness, B, cfg.tol):
            witness = None
    upper = len(witness) if witness is not None else 2**n
    if witness is None:
        witness = [np.eye(2**n, dtype=complex)[:, i] for i in range(2**n)]
        witness = [w for w in witness if np.linalg.norm(B.conj().T @ w) > 1e-12]
        upper = len(witness)

    m = lower
    while m < upper:
        found = _lsq_witness(B, m, n, cfg.schmidt_restarts, cfg.seed)
        if found is not None and witness_valid(found, B, cfg.tol):
            witness, upper = found, m
            break
        m += 1

    notes = tuple(reasons)
    if upper > m_max:
        return SchmidtBounds(min(lower, m_max + 1), m_max + 1, False, None, True, notes + ("no witness within m_max",))
    return SchmidtBounds(lower, upper, lower == upper, witness, lower < upper, notes)


# ---------------------------------------------------------------------------
# criteria


@dataclass
class SchmidtSum:
    passes: bool
    sum_lower: int
    sum_upper: int
    bounds: list[SchmidtBounds] = field(default_factory=list)
    n_qubits: int = 0

    @property
    def certified_indistinguishable(self) -> bool:
        return self.sum_lower > 2**self.n_qubits


def _check_orthogonal(states, tol: Tolerances) -> None:
    for a, b in itertools.combinations(states, 2):
        if not supports_orthogonal(a, b, tol.orth):
            raise PreconditionError("states are not pairwise orthogonal")


def schmidt_sum_criterion(states: Sequence[StateLike], cfg: RunConfig | None = None) -> SchmidtSum:
    """Necessary condition for local distinguishability: the bounds must fit in ``2**n``."""
    cfg = cfg or RunConfig()
    states = [as_state(s) for s in states]
    n = states[0].n_qubits
    _check_orthogonal(states, cfg.tol)
    bounds = [orth_schmidt_number(s, cfg=cfg) for s in states]
    lo = sum(b.lower for b in bounds)
    hi = sum(b.upper for b in bounds)
    return SchmidtSum(lo <= 2**n, lo, hi, bounds, n)


@dataclass
class SubspaceCertificate:
    dim: int
    product_members_max: int
    sum_lower: int
    n_qubits: int
    completeness: str

    @property
    def indistinguishable(self) -> bool:
        return self.completeness == "high" and self.sum_lower > 2**self.n_qubits


def subspace_schmidt_certificate(S, cfg: RunConfig | None = None) -> SubspaceCertificate:
    """Schmidt-sum bound valid for every orthonormal basis of ``S``.

    A basis can contain at most as many product members as there are
    pairwise orthogonal product states in ``S``; every other member has
    orthogonal Schmidt number at least two.
    """
    cfg = cfg or RunConfig()
    if not isinstance(S, Subspace):
        S = Subspace.from_vectors(S, cfg.tol)
    found = product_states_in_subspace(S, cfg)
    vecs = [h.vector for h in found.hits]
    best = 0
    for size in range(len(vecs), 0, -1):
        for combo in itertools.combinations(vecs, size):
            if all(abs(np.vdot(a, b)) <= 1e-7 for a, b in itertools.combinations(combo, 2)):
                best = size
                break
        if best:
            break
    dim = S.dim
    return SubspaceCertificate(dim, best, 2 * (dim - best) + best, S.n_qubits, found.completeness)


# ---------------------------------------------------------------------------
# two-qubit characterization

ADMISSIBLE_2X2 = [
    (2, 2),
    (2, 1, 1),
    (1, 1, 1, 1),
    (2, 1),
    (1, 1, 1),
    (1, 1),
]


@dataclass
class TwoQubitDecision:
    distinguishable: bool | None
    signature: tuple[int, ...] | None
    bounds: list[SchmidtBounds]
    sum_lower: int
    sum_upper: int
    protocol_verdict: str | None = None
    agrees: bool | None = None

    @property
    def inconclusive(self) -> bool:
        return self.distinguishable is None


def decide_2x2(
    states: Sequence[StateLike], cfg: RunConfig | None = None, *, run_protocol: bool = True
) -> TwoQubitDecision:
    """Exact two-qubit test: distinguishable iff the Schmidt sum is at most 4.

    With ``run_protocol`` the protocol search is also run and its verdict is
    compared against the Schmidt-sum answer.
    """
    cfg = cfg or RunConfig()
    states = [as_state(s) for s in states]
    if any(s.n_qubits != 2 for s in states):
        raise PreconditionError("decide_2x2 needs two-qubit states")
    if not 2 <= len(states) <= 4:
        raise PreconditionError("decide_2x2 needs between 2 and 4 states")
    _check_orthogonal(states, cfg.tol)
    bounds = [orth_schmidt_number(s, cfg=cfg) for s in states]
    lo = sum(b.lower for b in bounds)
    hi = sum(b.upper for b in bounds)
    if lo > 4:
        verdict: bool | None = False
    elif hi <= 4:
        verdict = True
    else:
        verdict = None
    signature = None
    if all(b.exact for b in bounds):
        signature = tuple(sorted((b.lower for b in bounds), reverse=True))
    if verdict and signature is not None and signature not in ADMISSIBLE_2X2:
        verdict = None
    out = TwoQubitDecision(verdict, signature, bounds, lo, hi)
    if run_protocol:
        from .lpmcc import decide

        dec = decide(states, cfg=cfg)
        out.protocol_verdict = dec.verdict
        if verdict is not None and dec.verdict != "Inconclusive":
            out.agrees = verdict == (dec.verdict == "Distinguishable")
    return out
