"""Random two-qubit instances with a prescribed orthogonal-Schmidt signature.

Distinguishable instances are grouped members of a one-way local product
basis: Alice measures first, Bob's basis depends on her outcome.  Groups of
two always take one member per Alice outcome, so a pure superposition is
entangled and a mixture has rank two; either way its value is the group size.
"""

import numpy as np

from qubitlocc.qstate import random_unitary

ADMISSIBLE = [(2, 2), (2, 1, 1), (1, 1, 1, 1), (2, 1), (1, 1, 1), (1, 1)]


def local_basis(rng):
    """Members |a_i> (x) |b_ij>, ordered so members 0, 1 differ in Alice's outcome."""
    A = random_unitary(2, rng)
    B = [random_unitary(2, rng) for _ in range(2)]
    m = [np.kron(A[:, i], B[i][:, j]) for i in range(2) for j in range(2)]
    return [m[0], m[2], m[1], m[3]]


def _group_state(members, rng, mixed):
    if len(members) == 1:
        v = members[0]
        return np.outer(v, v.conj()) if mixed else v
    if mixed:
        w = rng.uniform(0.2, 0.8)
        return w * np.outer(members[0], members[0].conj()) + (1 - w) * np.outer(members[1], members[1].conj())
    c = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    c = c / np.linalg.norm(c)
    return c[0] * members[0] + c[1] * members[1]


def swap_qubits(state):
    s = np.asarray(state)
    P = np.eye(4)[[0, 2, 1, 3]]
    return P @ s if s.ndim == 1 else P @ s @ P.T


def admissible_instance(signature, rng):
    """States with the given signature (sorted descending), distinguishable by construction."""
    m = local_basis(rng)
    groups, k = [], 0
    # pair members 0,1 and 2,3 so a group of two spans both of Alice's outcomes
    for size in signature:
        if size == 2:
            groups.append([m[k], m[k + 1]])
            k += 2
        else:
            groups.append([m[k]])
            k += 1
    states = [_group_state(g, rng, bool(rng.integers(2))) for g in groups]
    if rng.integers(2):
        states = [swap_qubits(s) for s in states]
    return states


def local_unitary(rng):
    return np.kron(random_unitary(2, rng), random_unitary(2, rng))


def apply(U, state):
    s = np.asarray(state)
    return U @ s if s.ndim == 1 else U @ s @ U.conj().T


def two_two_one(rng):
    """Two entangled pure states and a product state (sum 5)."""
    a = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    a = a / np.linalg.norm(a)
    e00, e01, e11 = np.eye(4)[0], np.eye(4)[1], np.eye(4)[3]
    states = [a[0] * e00 + a[1] * e11, -np.conj(a[1]) * e00 + np.conj(a[0]) * e11, e01]
    U = local_unitary(rng)
    return [apply(U, s) for s in states]
