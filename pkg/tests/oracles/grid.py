"""Brute-force Bloch-grid search for orthogonality-keeping qubit bases.

Deliberately independent of the package: collapses are computed with plain
einsum on explicit support vectors, and bases are enumerated on a 1-degree
(theta, phi) grid.
"""

import numpy as np

DEG = np.pi / 180


def grid_points(step_deg=1.0):
    th = np.arange(0, 180 + 1e-9, step_deg) * DEG
    ph = np.arange(0, 360, step_deg) * DEG
    T, P = np.meshgrid(th, ph, indexing="ij")
    r = np.stack([np.sin(T) * np.cos(P), np.sin(T) * np.sin(P), np.cos(T)], axis=-1)
    v = np.stack([np.cos(T / 2), np.exp(1j * P) * np.sin(T / 2)], axis=-1)
    return r, v  # shapes (nt, np, 3) and (nt, np, 2)


def support_vectors(state, tol=1e-10):
    a = np.asarray(state, dtype=complex)
    if a.ndim == 1:
        return a[:, None] / np.linalg.norm(a)
    w, u = np.linalg.eigh(a / np.trace(a).real)
    keep = w > tol
    return u[:, keep] * np.sqrt(w[keep])


def _split(vecs, n, party):
    t = vecs.reshape((2,) * n + (vecs.shape[1],))
    t = np.moveaxis(t, party, 0)
    return t.reshape(2, -1, vecs.shape[-1])


def _parts(states, party):
    n = int(round(np.log2(np.asarray(states[0]).shape[0])))
    return [_split(support_vectors(s), n, party) for s in states]


def _violation(parts, v):
    """Worst pairwise overlap after either outcome for qubit vectors ``v[..., 2]``."""
    vp = np.stack([-np.conj(v[..., 1]), np.conj(v[..., 0])], axis=-1)
    worst = np.zeros(v.shape[:-1])
    for outcome in (v, vp):
        coll = [np.einsum("...i,ixk->...xk", outcome.conj(), p) for p in parts]
        for i in range(len(parts)):
            for j in range(i + 1, len(parts)):
                ov = np.einsum("...xk,...xl->...kl", coll[i].conj(), coll[j])
                worst = np.maximum(worst, np.sqrt(np.sum(np.abs(ov) ** 2, axis=(-2, -1))))
    return worst


def _lipschitz(parts):
    # |<v|N|v>| changes at most |N - Tr(N)/2| times the Bloch angle
    lip = 0.0
    for i in range(len(parts)):
        for j in range(i + 1, len(parts)):
            for k in range(parts[i].shape[2]):
                for l in range(parts[j].shape[2]):
                    N = parts[j][:, :, l] @ parts[i][:, :, k].conj().T
                    lip += np.linalg.norm(N - np.trace(N) / 2 * np.eye(2)) ** 2 / 2
    return np.sqrt(lip)


def _reach(lip, step_deg):
    return lip * (step_deg / np.sqrt(2)) * DEG * 1.05


def violation_map(states, party, step_deg=1.0):
    """Violation on the whole grid plus its Lipschitz constant in the Bloch angle."""
    parts = _parts(states, party)
    r, v = grid_points(step_deg)
    return r, _violation(parts, v), _lipschitz(parts)


def _bloch_to_vec(r):
    r = r / np.linalg.norm(r, axis=-1, keepdims=True)
    th = np.arccos(np.clip(r[..., 2], -1, 1))
    ph = np.arctan2(r[..., 1], r[..., 0])
    return np.stack([np.cos(th / 2), np.exp(1j * ph) * np.sin(th / 2)], axis=-1)


def refines_to_zero(states, party, r0, radius_deg=1.0, step_deg=0.05):
    """Does a fine square patch around ``r0`` contain a near-exact solution?

    A coarse grid point next to a true solution always passes; a spurious
    local minimum in a shallow valley does not, because the fine reach
    shrinks with the step.
    """
    parts = _parts(states, party)
    r0 = np.asarray(r0, dtype=float)
    a = np.cross(r0, [1.0, 0, 0] if abs(r0[0]) < 0.9 else [0, 1.0, 0])
    a /= np.linalg.norm(a)
    b = np.cross(r0, a)
    g = np.arange(-radius_deg, radius_deg + 1e-9, step_deg) * DEG
    A, B = np.meshgrid(g, g, indexing="ij")
    pts = r0 + A[..., None] * a + B[..., None] * b
    worst = _violation(parts, _bloch_to_vec(pts))
    return worst.min() <= _reach(_lipschitz(parts), step_deg)


def flagged_bases(states, party, step_deg=1.0):
    """Grid Bloch vectors whose violation is within Lipschitz reach of zero."""
    r, worst, lip = violation_map(states, party, step_deg)
    reach = _reach(lip, step_deg)
    mask = worst <= reach
    return r[mask], r, worst, reach


def basis_angle_deg(r1, r2):
    c = abs(float(np.dot(r1, r2)))
    return np.degrees(np.arccos(min(1.0, c)))


def local_minima(worst, reach):
    """Grid points below ``reach`` that are no larger than their 8 neighbours.

    The phi axis wraps around; the theta rows at the poles are compared only
    within the grid.
    """
    padded = np.pad(worst, ((1, 1), (0, 0)), constant_values=np.inf)
    padded = np.concatenate([padded[:, -1:], padded, padded[:, :1]], axis=1)
    centre = padded[1:-1, 1:-1]
    is_min = np.ones_like(centre, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == dj == 0:
                continue
            nb = padded[1 + di : padded.shape[0] - 1 + di, 1 + dj : padded.shape[1] - 1 + dj]
            is_min &= centre <= nb
    return is_min & (worst <= reach)


def grid_search(states, party, step_deg=1.0):
    """``(found, covered)``.

    ``found`` are grid local minima within reach whose fine neighbourhood holds
    a near-exact solution; ``covered`` are all grid points within reach.
    """
    flagged, r, worst, reach = flagged_bases(states, party, step_deg)
    found = [g for g in r[local_minima(worst, reach)] if refines_to_zero(states, party, g)]
    return np.array(found).reshape(-1, 3), flagged


def circle_angle_deg(r, axes):
    """Angle from ``r`` (or ``-r``) to the great circle spanned by ``axes``."""
    normal = np.cross(axes[0], axes[1])
    normal = normal / np.linalg.norm(normal)
    return np.degrees(np.arcsin(min(1.0, abs(float(np.dot(r, normal))))))
