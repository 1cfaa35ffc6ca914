"""Random orthogonal state sets of several structural kinds (n = 2, 3; N = 2..4)."""

import numpy as np

from qubitlocc.qstate import kron, random_unitary


def _generic(d, N, rng):
    U = random_unitary(d, rng)
    return [U[:, k] for k in range(N)]


def _local_basis_members(n, d, N, rng):
    locs = [random_unitary(2, rng) for _ in range(n)]
    B = np.column_stack([kron(*[locs[q][:, int(b)] for q, b in enumerate(format(k, f"0{n}b"))]) for k in range(d)])
    out = [B[:, k] for k in rng.permutation(d)[:N]]
    # rotate two members into an entangled pair
    c = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    c /= np.linalg.norm(c)
    out[0], out[1] = c[0] * out[0] + c[1] * out[1], -np.conj(c[1]) * out[0] + np.conj(c[0]) * out[1]
    return out


def _mixed_plus_pure(d, N, rng):
    U = random_unitary(d, rng)
    rho = 0.4 * np.outer(U[:, 0], U[:, 0].conj()) + 0.6 * np.outer(U[:, 1], U[:, 1].conj())
    return [rho] + [U[:, 2 + k] for k in range(min(N - 1, d - 2))]


def _ghz_like(d, N, rng):
    e, f = np.eye(d)[0], np.eye(d)[-1]
    a = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    a /= np.linalg.norm(a)
    out = [a[0] * e + a[1] * f, -np.conj(a[1]) * e + np.conj(a[0]) * f]
    return out + [np.eye(d)[1 + k] for k in range(N - 2)]


def random_state_set(i, rng):
    """The ``i``-th set: qubit count, size and kind cycle with ``i``."""
    n = 2 + i % 2
    N = 2 + (i // 2) % 3
    d = 2**n
    kind = i % 5
    if kind in (0, 1):
        return _generic(d, N, rng)
    if kind == 2:
        return _local_basis_members(n, d, N, rng)
    if kind == 3:
        return _mixed_plus_pure(d, N, rng)
    return _ghz_like(d, N, rng)
