"""Product states inside a subspace, and unextendibility checks.

A vector ``sum_i alpha_i |b_i>`` is product exactly when every single-qubit
flattening has rank one.  Rather than solving the 2x2-minor system directly we
parametrize the product manifold in a random affine chart,

    |psi(z)> = (x)_k U_k (1, z_k)^T,

and drive the projection onto the orthogonal complement of the subspace to
zero.  That residual is holomorphic in ``z``, so complex Gauss-Newton
converges quadratically at isolated regular solutions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .config import DEFAULT_TOL, RunConfig, Tolerances
from .errors import PreconditionError, UnsupportedSizeError
from .qstate import PureState, Subspace, _move_party_first, kron, random_unitary


# ---------------------------------------------------------------------------
# rank-one tests


def is_product(psi, tol: float = DEFAULT_TOL.prod) -> list[np.ndarray] | None:
    """Single-qubit factors of ``psi`` if it is a product state, else ``None``.

    Factors are unit vectors with the first non-negligible amplitude real and
    positive; the global norm and phase of ``psi`` go into the first factor.
    """
    a = np.asarray(psi, dtype=complex).reshape(-1)
    n = int(np.log2(a.size))
    nrm = np.linalg.norm(a)
    if nrm == 0:
        return None
    if n == 0:
        return []
    unit = a / nrm
    factors = []
    for q in range(n):
        m = _move_party_first(unit, n, q)
        u, s, _ = np.linalg.svd(m)
        if s.size > 1 and s[1] > tol:
            return None
        factors.append(_gauge(u[:, 0]))
    recon = kron(*factors)
    phase = np.vdot(recon, unit)
    if abs(abs(phase) - 1) > tol or np.linalg.norm(unit - phase * recon) > tol * max(1, n):
        return None
    factors[0] = factors[0] * phase * nrm
    return factors


def _gauge(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    v = v / np.linalg.norm(v)
    k = int(np.argmax(np.abs(v) > 1e-12))
    return v * (abs(v[k]) / v[k])


def gauge_vector(v: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Normalize and rotate the global phase so the first nonzero entry is real > 0."""
    v = np.asarray(v, dtype=complex)
    v = v / np.linalg.norm(v)
    k = int(np.argmax(np.abs(v) > tol))
    return v * (abs(v[k]) / v[k])


def fubini_study(a, b) -> float:
    """Angle ``arccos |<a|b>|`` between two rays."""
    a = np.asarray(a, dtype=complex).reshape(-1)
    b = np.asarray(b, dtype=complex).reshape(-1)
    c = abs(np.vdot(a, b)) / (np.linalg.norm(a) * np.linalg.norm(b))
    return float(np.arccos(min(1.0, c)))


def minor_quadratics(a0: np.ndarray, a1: np.ndarray, n: int) -> np.ndarray:
    """Coefficients ``(c00, c01, c11)`` of every 2x2 minor of ``z0 a0 + z1 a1``.

    The minors run over every single-qubit flattening of the ``n``-qubit
    pencil, so the pencil member is product iff all quadratics vanish.
    """
    rows = []
    for q in range(n):
        m0 = _move_party_first(a0, n, q)
        m1 = _move_party_first(a1, n, q)
        cols = m0.shape[1]
        for i in range(cols):
            for j in range(i + 1, cols):
                # det [[x_i, x_j],[y_i, y_j]] with x = z0 m0[0] + z1 m1[0], y likewise
                p0i, p0j, q0i, q0j = m0[0, i], m0[0, j], m0[1, i], m0[1, j]
                p1i, p1j, q1i, q1j = m1[0, i], m1[0, j], m1[1, i], m1[1, j]
                c00 = p0i * q0j - p0j * q0i
                c11 = p1i * q1j - p1j * q1i
                c01 = p0i * q1j + p1i * q0j - p0j * q1i - p1j * q0i
                rows.append((c00, c01, c11))
    if not rows:
        return np.zeros((0, 3), dtype=complex)
    return np.array(rows, dtype=complex)


def pencil_product_points(
    a0: np.ndarray, a1: np.ndarray, n: int, tol: float = 1e-9
) -> list[np.ndarray] | None:
    """Projective points ``(z0, z1)`` where ``z0 a0 + z1 a1`` is product.

    Returns ``None`` when every member of the pencil is product, otherwise the
    (at most two) roots common to all minor quadratics.
    """
    quads = minor_quadratics(a0, a1, n)
    scale = max(np.linalg.norm(a0), np.linalg.norm(a1)) ** 2
    if quads.size == 0 or np.max(np.abs(quads)) <= tol * scale:
        return None
    lead = quads[np.argmax(np.linalg.norm(quads, axis=1))]
    c00, c01, c11 = lead
    roots: list[np.ndarray] = []
    if abs(c00) > tol * scale:
        # z1 = 1, solve c00 z0^2 + c01 z0 + c11 = 0
        for z0 in np.roots([c00, c01, c11]):
            roots.append(np.array([z0, 1.0], dtype=complex))
    else:
        # c00 ~ 0: z1 (c01 z0 + c11 z1) = 0
        roots.append(np.array([1.0, 0.0], dtype=complex))
        if abs(c01) > tol * scale:
            roots.append(np.array([-c11, c01], dtype=complex))
        else:
            roots.append(np.array([1.0, 0.0], dtype=complex))
    out = []
    for z in roots:
        z = z / np.linalg.norm(z)
        vals = quads @ np.array([z[0] ** 2, z[0] * z[1], z[1] ** 2])
        if np.max(np.abs(vals)) <= 1e-7 * scale:
            if not any(fubini_study(z, w) < 1e-8 for w in out):
                out.append(z)
    return out


# ---------------------------------------------------------------------------
# product states in a subspace


@dataclass(frozen=True, eq=False)
class ProductStateHit:
    coefficients: np.ndarray
    factors: list[np.ndarray]
    residual: float
    family_dim: int = 0

    @property
    def vector(self) -> np.ndarray:
        return kron(*self.factors)


@dataclass
class ProductSearchResult:
    hits: list[ProductStateHit]
    completeness: str
    restarts_used: int
    last_new_hit: int
    dropped: int = 0
    notes: list[str] = field(default_factory=list)

    def __iter__(self):
        return iter(self.hits)

    def __len__(self):
        return len(self.hits)


def _chart_states(z: np.ndarray, charts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Product vectors and their z-derivatives for a batch of chart points.

    ``z``: (B, n) complex; ``charts``: (B, n, 2, 2) unitaries.
    Returns psi (B, 2**n) and dpsi (B, 2**n, n).
    """
    B, n = z.shape
    ones = np.ones_like(z)
    local = np.einsum("bkij,bkj->bki", charts, np.stack([ones, z], axis=-1))
    dlocal = charts[..., :, 1]  # derivative of U (1, z)^T w.r.t. z
    psi = np.ones((B, 1), dtype=complex)
    for k in range(n):
        psi = np.einsum("bi,bj->bij", psi, local[:, k]).reshape(B, -1)
    dpsi = np.empty((B, 2**n, n), dtype=complex)
    for k in range(n):
        d = np.ones((B, 1), dtype=complex)
        for q in range(n):
            f = dlocal[:, q] if q == k else local[:, q]
            d = np.einsum("bi,bj->bij", d, f).reshape(B, -1)
        dpsi[:, :, k] = d
    return psi, dpsi


def _newton(
    z: np.ndarray,
    charts: np.ndarray,
    comp: np.ndarray,
    iters: int,
    square: np.ndarray | None = None,
    fixed_dir: np.ndarray | None = None,
) -> np.ndarray:
    """Batched complex Gauss-Newton on ``comp^dagger psi(z) = 0``.

    ``square`` optionally maps the residual onto an n-dimensional square
    subsystem; ``fixed_dir`` (B, n) freezes one tangent direction per item.
    """
    cd = comp.conj().T
    for _ in range(iters):
        psi, dpsi = _chart_states(z, charts)
        nrm = np.linalg.norm(psi, axis=1, keepdims=True)
        F = (psi @ cd.T) / nrm
        J = np.einsum("rd,bdk->brk", cd, dpsi) / nrm[:, :, None]
        if square is not None:
            F = np.einsum("brs,bs->br", square, F)
            J = np.einsum("brs,bsk->brk", square, J)
        if fixed_dir is not None:
            P = np.eye(z.shape[1])[None] - np.einsum("bi,bj->bij", fixed_dir, fixed_dir.conj())
            J = J @ P
        step = np.einsum("bkr,br->bk", np.linalg.pinv(J, rcond=1e-13), F)
        if fixed_dir is not None:
            step = np.einsum("bij,bj->bi", P, step)
        z = z - step
        bad = ~np.isfinite(z).all(axis=1) | (np.abs(z).max(axis=1) > 1e8)
        if bad.any():
            z[bad] = 0.0
    return z


def _residuals(z, charts, comp):
    psi, _ = _chart_states(z, charts)
    psi = psi / np.linalg.norm(psi, axis=1, keepdims=True)
    return psi, np.linalg.norm(psi @ comp.conj(), axis=1)


def _jacobian_nullity(z, chart, comp, tol=1e-6) -> tuple[int, np.ndarray]:
    psi, dpsi = _chart_states(z[None], chart[None])
    nrm = np.linalg.norm(psi)
    J = (comp.conj().T @ dpsi[0]) / nrm
    if J.shape[0] == 0:
        return z.size, np.eye(z.size, dtype=complex)
    _, s, vh = np.linalg.svd(J)
    s_full = np.zeros(z.size)
    s_full[: s.size] = s
    null = s_full <= tol * max(1.0, s_full.max())
    return int(null.sum()), vh.conj().T[:, null] if null.any() else np.zeros((z.size, 0))


def _family_dim(z, chart, comp, tol_prod, iters, step=0.05) -> int:
    """Null-space dimension of the residual Jacobian, confirmed by re-solving.

    Each null direction is followed by a finite step and a Newton solve that
    may not move along that direction. Landing on an exact solution confirms a
    genuine family; a singular isolated root leaves a visible residual.
    """
    nullity, vecs = _jacobian_nullity(z, chart, comp)
    confirmed = 0
    psi0, _ = _residuals(z[None], chart[None], comp)
    for k in range(nullity):
        t = vecs[:, k]
        z1 = (z + step * t)[None].copy()
        z1 = _newton(z1, chart[None], comp, iters, fixed_dir=t[None])
        psi1, res = _residuals(z1, chart[None], comp)
        if res[0] <= tol_prod and fubini_study(psi0[0], psi1[0]) > step / 10:
            confirmed += 1
    return confirmed


def _refine_mp(z, chart, source, dps=50, iters=200):
    """Extended-precision Gauss-Newton against the exact span of ``source``.

    Singular roots converge only to ~eps**(1/m) in double precision; in
    ``dps`` digits the same iteration resolves them far below the dedup radius.
    """
    import mpmath as mp

    with mp.workdps(dps):
        V = mp.matrix(source.tolist())
        Vh = V.H
        Q = mp.eye(V.rows) - V * mp.inverse(Vh * V) * Vh
        U = [mp.matrix(c.tolist()) for c in chart]
        zz = [mp.mpc(complex(x)) for x in z]
        n = len(zz)

        def evaluate(zs):
            local = [U[k] * mp.matrix([1, zs[k]]) for k in range(n)]
            dloc = [U[k][:, 1] for k in range(n)]
            psi = _mp_kron(local)
            cols = []
            for k in range(n):
                cols.append(_mp_kron([dloc[q] if q == k else local[q] for q in range(n)]))
            J = mp.matrix(psi.rows, n)
            for k in range(n):
                for r in range(psi.rows):
                    J[r, k] = cols[k][r]
            return psi, Q * psi, Q * J

        psi, F, J = evaluate(zz)
        res = mp.norm(F) / mp.norm(psi)
        for _ in range(iters):
            if res < mp.mpf(10) ** (-(dps - 8)):
                break
            Jh = J.H
            A = Jh * J
            delta = None
            # escalate the damping only when the Gauss-Newton system is singular
            for damp in (-2 * dps + 10, -(dps - 10)):
                try:
                    delta = mp.lu_solve(A + mp.eye(n) * (mp.mpf(10) ** damp * (1 + mp.norm(A))), Jh * F)
                    break
                except ZeroDivisionError:
                    continue
            if delta is None:
                break
            best = None
            for mult in (1, 2, 3, 4, 6, 8, 0.5, 0.25, 0.1, 0.01):
                trial = [zz[k] - mult * delta[k] for k in range(n)]
                p2, f2, j2 = evaluate(trial)
                r2 = mp.norm(f2) / mp.norm(p2)
                if best is None or r2 < best[0]:
                    best = (r2, trial, p2, f2, j2)
            if best[0] >= res:
                break
            res, zz, psi, F, J = best
        return np.array([complex(x) for x in zz]), float(res)


def _refine_singular(z, chart, source, rng, attempts=6, target=1e-25):
    """Perturb-and-refine: double-precision stalls sit in curved valleys that
    extended-precision Gauss-Newton cannot leave, so restart from nearby."""
    best_z, best_r = z, np.inf
    for _ in range(attempts):
        start = z + 1e-2 * (rng.standard_normal(z.size) + 1j * rng.standard_normal(z.size))
        zr, r = _refine_mp(start, chart, source)
        if r < best_r:
            best_z, best_r = zr, r
        if best_r < target:
            break
    return best_z


def _mp_kron(vectors):
    import mpmath as mp

    out = [mp.mpc(1)]
    for v in vectors:
        out = [a * v[i] for a in out for i in range(v.rows)]
    return mp.matrix(out)


def product_states_in_subspace(
    S: Subspace | Sequence,
    cfg: RunConfig | None = None,
    *,
    restarts: int | None = None,
    seed: int | None = None,
    iters: int = 120,
    dedup: float = 1e-6,
    cluster: float = 1e-4,
) -> ProductSearchResult:
    """Find product states in ``S`` by multi-start Newton in random charts.

    Half of the restarts run Newton on a random square subsystem of the
    residual equations and then polish on the full system; the other half run
    full Gauss-Newton (least squares on the overdetermined system). Hits are
    deduplicated by Fubini-Study distance and sorted canonically. Singular
    isolated roots are polished in extended precision when the subspace keeps
    its spanning vectors, and absorb double-precision stragglers within
    ``cluster``.
    """
    cfg = cfg or RunConfig()
    tol: Tolerances = cfg.tol
    if not isinstance(S, Subspace):
        S = Subspace.from_vectors(S, tol)
    n = S.n_qubits
    if n > 4:
        raise UnsupportedSizeError("product search supports at most 4 qubits")
    if S.dim < 1:
        raise PreconditionError("subspace must have dimension >= 1")
    restarts = cfg.restarts if restarts is None else restarts
    rng = np.random.default_rng(cfg.seed if seed is None else seed)
    comp = S.complement().basis
    n_eq = comp.shape[1]

    if n_eq == 0:
        e0 = np.array([1, 0], dtype=complex)
        hit = ProductStateHit(gauge_vector(S.basis.conj().T @ kron(*([e0] * n))), [e0] * n, 0.0, n)
        return ProductSearchResult([hit], "family", restarts, 0, notes=["S is the full space"])

    charts = np.stack(
        [np.stack([random_unitary(2, rng) for _ in range(n)]) for _ in range(restarts)]
    )
    z = (rng.standard_normal((restarts, n)) + 1j * rng.standard_normal((restarts, n))) / np.sqrt(2)
    half = restarts // 2
    if half and n_eq > n:
        square = rng.standard_normal((half, n, n_eq)) + 1j * rng.standard_normal((half, n, n_eq))
        z[:half] = _newton(z[:half], charts[:half], comp, iters // 2, square=square)
    z = _newton(z, charts, comp, iters)
    psi, res = _residuals(z, charts, comp)

    hits: list[ProductStateHit] = []
    singular: list[bool] = []
    dropped = 0
    converged = [b for b in np.argsort(res, kind="stable") if np.isfinite(res[b]) and res[b] <= tol.prod]
    dropped += int(np.sum(np.isfinite(res) & (res > tol.prod) & (res < 1e-5)))
    owner = {}
    max_family_hits = 16
    capped = False
    for b in converged:
        vec = gauge_vector(psi[b])
        near = _nearest(vec, hits, singular, dedup, cluster, S, tol)
        if near is not None:
            owner[b] = near
            continue
        zb = z[b]
        nullity, _ = _jacobian_nullity(zb, charts[b], comp)
        full = sum(1 for h in hits if h.family_dim) >= max_family_hits
        # past the cap the result is already a family report; skip the tangent re-solves
        fam = _family_dim(zb, charts[b], comp, tol.prod, iters) if nullity and not full else 0
        if nullity and full:
            owner[b] = next(i for i, h in enumerate(hits) if h.family_dim)
            capped = True
            continue
        is_singular = nullity > 0 and fam == 0
        if is_singular and S.source is not None:
            zb = _refine_singular(zb, charts[b], S.source, rng)
            p1, _ = _residuals(zb[None], charts[b][None], comp)
            vec = gauge_vector(p1[0])
            near = _nearest(vec, hits, singular, dedup, cluster)
            if near is not None:
                owner[b] = near
                continue
        factors = is_product(vec, tol=1e-7)
        if factors is None:
            dropped += 1
            continue
        factors = [_gauge(f) for f in factors]
        vec = kron(*factors)
        coeffs = gauge_vector(S.basis.conj().T @ vec)
        hits.append(ProductStateHit(coeffs, factors, S.residual(vec), fam))
        singular.append(is_singular)
        owner[b] = len(hits) - 1

    first_seen = {}
    for b, h in owner.items():
        first_seen[h] = min(first_seen.get(h, b), b)
    last_new = max(first_seen.values(), default=-1)
    order = sorted(range(len(hits)), key=lambda i: _canonical_key(hits[i].vector))
    hits = [hits[i] for i in order]
    window = min(256, restarts // 2)
    if any(h.family_dim > 0 for h in hits):
        completeness = "family"
    elif restarts - 1 - last_new >= window:
        completeness = "high"
    else:
        completeness = "low"
    notes = []
    if dropped:
        notes.append(f"{dropped} near-converged candidates dropped")
    if any(singular):
        notes.append("singular isolated root(s) present")
    if capped:
        notes.append(f"continuous family sampled at {max_family_hits} representatives")
    return ProductSearchResult(hits, completeness, restarts, last_new, dropped, notes)


def _nearest(vec, hits, singular, dedup, cluster, S=None, tol=None):
    for i, h in enumerate(hits):
        radius = cluster if singular[i] else dedup
        if fubini_study(vec, h.vector) < radius:
            return i
    if S is None:
        return None
    for i, h in enumerate(hits):
        if h.family_dim and _same_linear_family(vec, h.vector, S, tol):
            return i
    return None


def _same_linear_family(a, b, S, tol) -> bool:
    """Whether the chord between two family points stays product and inside S."""
    phase = np.vdot(b, a)
    if abs(phase) > 0:
        a = a * (abs(phase) / phase)
    for t in (0.5, 0.3):
        m = t * a + (1 - t) * b
        if np.linalg.norm(m) < 1e-8:
            return False
        m = m / np.linalg.norm(m)
        if S.residual(m) > tol.prod or is_product(m, tol=1e-7) is None:
            return False
    return True


def _canonical_key(vec: np.ndarray) -> tuple:
    v = gauge_vector(vec)
    return tuple(np.round(np.concatenate([-np.abs(v), v.real, v.imag]), 6))


# ---------------------------------------------------------------------------
# unextendibility


@dataclass
class UpbCheck:
    orthonormal_products: bool
    complement_product_hits: list[ProductStateHit]
    unextendible: bool
    completeness: str
    complement_dim: int


def upb_check(states: Sequence, cfg: RunConfig | None = None, **search_kw) -> UpbCheck:
    """Check whether ``states`` form a UB (no product state in the complement).

    ``orthonormal_products`` additionally reports whether the members are
    pairwise orthogonal product states (the UPB case).
    """
    cfg = cfg or RunConfig()
    tol = cfg.tol
    vecs = [np.asarray(s, dtype=complex).reshape(-1) for s in states]
    mat = np.column_stack(vecs)
    sv = np.linalg.svd(mat, compute_uv=False)
    if sv.min() <= tol.rank * sv.max():
        raise PreconditionError("states are linearly dependent")
    units = mat / np.linalg.norm(mat, axis=0)
    gram = units.conj().T @ units
    orthogonal = np.max(np.abs(gram - np.eye(len(vecs)))) <= tol.orth
    products = all(is_product(v, tol.prod) is not None for v in vecs)
    span = Subspace.from_vectors(vecs, tol)
    comp = span.complement()
    if comp.dim == 0:
        return UpbCheck(orthogonal and products, [], True, "high", 0)
    found = product_states_in_subspace(comp, cfg, **search_kw)
    unext = len(found.hits) == 0 and found.completeness == "high"
    return UpbCheck(orthogonal and products, found.hits, unext, found.completeness, comp.dim)


def product_subspace_of_pair(
    a0: np.ndarray, a1: np.ndarray, n: int, tol: float = 1e-9
) -> list[np.ndarray] | None:
    """Product vectors in ``span{a0, a1}`` (``None`` when all members are product)."""
    pts = pencil_product_points(a0, a1, n, tol)
    if pts is None:
        return None
    return [gauge_vector(z[0] * a0 + z[1] * a1) for z in pts]

