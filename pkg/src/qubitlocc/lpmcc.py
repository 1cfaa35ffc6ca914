"""Adaptive local projective protocols for orthogonal multi-qubit states.

At each node of the search some party whose qubit has not been measured yet
measures it in a basis ``{v, v_perp}``.  The basis must keep every pair of
surviving states orthogonal on both outcomes.  For a pair of support vectors
``a, b`` the overlap after outcome ``v`` is ``<v|N|v>`` with
``N = Tr_rest |b><a|``; writing ``N = H1 + i H2`` in Pauli form turns the
condition into two plane equations ``n1.r = n2.r = 0`` on the Bloch vector
``r`` of ``v``.  Intersecting all planes gives the candidate set of the party:
the whole sphere, a great circle, one antipodal pair, or nothing.

A state can also vanish on one outcome.  Because ``Tr N = 0``, the pair
conditions involving a vanishing state hold automatically, so such bases
already lie in the plane solution set; they are still listed explicitly as
canonical points of continuous families.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Hashable, Sequence

import numpy as np

from .config import RunConfig
from .errors import PreconditionError, StructuralError, UnsupportedSizeError
from .qstate import (
    StateLike,
    _move_party_first,
    as_state,
    bloch_decompose,
    bloch_vector,
    collapse_array,
    factor,
    from_bloch,
    kron,
    overlap_matrix,
    perp,
)
from .schmidt import _lower_from_factor


# ---------------------------------------------------------------------------
# types


@dataclass(frozen=True, eq=False)
class MeasurementBasis:
    party: int
    v: np.ndarray
    v_perp: np.ndarray
    bloch: np.ndarray

    @classmethod
    def from_vector(cls, party: int, v) -> "MeasurementBasis":
        v = np.asarray(v, dtype=complex).reshape(2)
        v = v / np.linalg.norm(v)
        return cls(party, v, perp(v), bloch_vector(v))

    @classmethod
    def from_bloch(cls, party: int, r) -> "MeasurementBasis":
        return cls.from_vector(party, from_bloch(r))

    @property
    def is_computational(self) -> bool:
        return abs(abs(self.bloch[2]) - 1) <= 1e-9

    def outcomes(self) -> tuple[np.ndarray, np.ndarray]:
        return self.v, self.v_perp


@dataclass(frozen=True, eq=False)
class CandidateSet:
    kind: str  # "Empty" | "Finite" | "Circle" | "Sphere"
    bases: list[MeasurementBasis]
    normals: np.ndarray
    axes: np.ndarray | None = None
    annihilation: list[MeasurementBasis] = field(default_factory=list)

    @property
    def continuous(self) -> bool:
        return self.kind in ("Circle", "Sphere")


@dataclass(eq=False)
class Leaf:
    label: Hashable | None
    failed: bool = False


@dataclass(eq=False)
class Node:
    party: int
    basis: MeasurementBasis
    children: tuple["Node | Leaf", "Node | Leaf"]
    labels: tuple = ()


ProtocolTree = Node | Leaf


@dataclass
class Decision:
    verdict: str  # "Distinguishable" | "Indistinguishable" | "Inconclusive"
    tree: ProtocolTree | None = None
    certificate: list[str] = field(default_factory=list)
    sampled_family: bool = False
    stats: dict = field(default_factory=dict)

    @property
    def distinguishable(self) -> bool:
        return self.verdict == "Distinguishable"


# ---------------------------------------------------------------------------
# candidate sets


def _factors(states: Sequence[StateLike], cfg: RunConfig) -> list[np.ndarray]:
    out = []
    for s in states:
        F = factor(s, cfg.tol)
        out.append(F / np.linalg.norm(F))
    return out


def _normals(Fs: Sequence[np.ndarray], m: int, j: int, tol_orth: float) -> np.ndarray:
    rows = []
    for Fa, Fb in itertools.combinations(Fs, 2):
        for ia in range(Fa.shape[1]):
            for ib in range(Fb.shape[1]):
                N = overlap_matrix(Fa[:, ia], Fb[:, ib], m, j)
                scale = np.linalg.norm(Fa[:, ia]) * np.linalg.norm(Fb[:, ib])
                n1, n2 = bloch_decompose(N, max(tol_orth * scale, 1e-12))
                rows.append(n1)
                rows.append(n2)
    if not rows:
        return np.zeros((0, 3))
    return np.array(rows)


def _local_direction(F: np.ndarray, m: int, j: int) -> np.ndarray | None:
    """The single local vector of a state whose reduced operator has rank one."""
    t = _move_party_first(F, m, j).reshape(2, -1)
    u, s, _ = np.linalg.svd(t)
    if s[0] == 0 or (s.size > 1 and s[1] > 1e-9 * s[0]):
        return None
    return u[:, 0]


def _canonical_sign(r: np.ndarray) -> np.ndarray:
    """Pick one of the two antipodal Bloch vectors of a basis deterministically."""
    for c in (r[2], r[0], r[1]):
        if abs(c) > 1e-12:
            return r if c > 0 else -r
    return r


def _basis_key(r: np.ndarray) -> np.ndarray:
    return _canonical_sign(r / np.linalg.norm(r))


def _dedup(rs: list[np.ndarray], tol: float = 1e-9) -> list[np.ndarray]:
    out: list[np.ndarray] = []
    for r in rs:
        k = _basis_key(r)
        if all(np.linalg.norm(k - o) > tol for o in out):
            out.append(k)
    return out


def _branches_orthogonal(Fs: Sequence[np.ndarray], m: int, j: int, v: np.ndarray, tol) -> bool:
    for w in (v, perp(v)):
        kids = [collapse_array(F, m, j, w) for F in Fs]
        kids = [k for k in kids if np.linalg.norm(k) ** 2 > tol.vanish]
        for a, b in itertools.combinations(kids, 2):
            if np.max(np.abs(a.conj().T @ b)) > tol.orth * max(1.0, np.linalg.norm(a) * np.linalg.norm(b)):
                return False
    return True


def _candidate_set(Fs: Sequence[np.ndarray], m: int, j: int, party: int, cfg: RunConfig) -> CandidateSet:
    tol = cfg.tol
    normals = _normals(Fs, m, j, tol.orth)
    scale = max((np.linalg.norm(r) for r in normals), default=0.0)
    if scale <= tol.plane:
        kind, rank, vt = "Sphere", 0, None
    else:
        _, s, vt = np.linalg.svd(normals)
        rank = int(np.sum(s > tol.plane * scale))
        kind = {1: "Circle", 2: "Finite", 3: "Empty"}[rank]

    annihilation = []
    for F in Fs:
        u = _local_direction(F, m, j)
        if u is None:
            continue
        r = bloch_vector(perp(u))
        if _branches_orthogonal(Fs, m, j, from_bloch(r), tol):
            annihilation.append(r)
    annihilation = _dedup(annihilation)

    bases: list[MeasurementBasis] = []
    axes = None
    if kind == "Finite":
        r = _basis_key(vt[2])
        if _branches_orthogonal(Fs, m, j, from_bloch(r), tol):
            bases.append(MeasurementBasis.from_bloch(party, r))
    elif kind == "Circle":
        axes = vt[1:3]
    if kind in ("Finite", "Empty"):
        # Already in the plane solution set in exact arithmetic; kept so a
        # borderline rank decision cannot lose a verified basis.
        for r in annihilation:
            if all(np.linalg.norm(r - b.bloch) > 1e-9 for b in bases):
                bases.append(MeasurementBasis.from_bloch(party, r))
        if bases and kind == "Empty":
            kind = "Finite"
    return CandidateSet(
        kind,
        bases,
        normals,
        axes,
        [MeasurementBasis.from_bloch(party, r) for r in annihilation],
    )


def ok_candidates(states: Sequence[StateLike], party: int, cfg: RunConfig | None = None) -> CandidateSet:
    """Orthogonality-keeping bases for a first measurement by ``party``."""
    cfg = cfg or RunConfig()
    states = [as_state(s) for s in states]
    _check_input(states, cfg, limit_size=False)
    n = states[0].n_qubits
    if not 0 <= party < n:
        raise IndexError(f"party {party} out of range for {n} qubits")
    return _candidate_set(_factors(states, cfg), n, party, party, cfg)


def _fibonacci_hemisphere(count: int) -> list[np.ndarray]:
    out = []
    golden = np.pi * (3 - np.sqrt(5))
    for i in range(count):
        z = 1 - (i + 0.5) / count
        rad = np.sqrt(max(0.0, 1 - z * z))
        out.append(np.array([rad * np.cos(golden * i), rad * np.sin(golden * i), z]))
    return out


def _canonical_directions(Fs: Sequence[np.ndarray], m: int, j: int) -> list[np.ndarray]:
    dirs = [np.array([0.0, 0.0, 1.0]), np.array([1.0, 0.0, 0.0]), np.array([0.0, 1.0, 0.0])]
    for F in Fs:
        t = _move_party_first(F, m, j).reshape(2, -1)
        rho = t @ t.conj().T
        _, vecs = np.linalg.eigh(rho)
        dirs.append(bloch_vector(vecs[:, 0]))
    return dirs


def _sampled_bases(cs: CandidateSet, Fs, m, j, cfg: RunConfig) -> list[np.ndarray]:
    """Canonical algebraic points first, then a uniform sample of the family."""
    canon = [b.bloch for b in cs.annihilation] + _canonical_directions(Fs, m, j)
    pts = []
    if cs.kind == "Sphere":
        pts = canon + _fibonacci_hemisphere(2 * cfg.circle_samples)
    else:
        e1, e2 = cs.axes
        for c in canon:
            p = np.dot(c, e1) * e1 + np.dot(c, e2) * e2
            if np.linalg.norm(p) > 1e-9:
                pts.append(p / np.linalg.norm(p))
        for t in np.arange(cfg.circle_samples) * np.pi / cfg.circle_samples:
            pts.append(np.cos(t) * e1 + np.sin(t) * e2)
    return _dedup(pts)


# ---------------------------------------------------------------------------
# search


@dataclass
class _Ctx:
    cfg: RunConfig
    max_nodes: int
    nodes: int = 0
    families: int = 0
    pruned_schmidt: int = 0
    budget_hit: bool = False
    log: list[str] = field(default_factory=list)


def _check_input(states, cfg: RunConfig, limit_size: bool = True) -> None:
    if len(states) < 2:
        raise PreconditionError("need at least two states")
    n = states[0].n_qubits
    if any(s.n_qubits != n for s in states):
        raise PreconditionError("states live on different numbers of qubits")
    if limit_size and (n > cfg.max_qubits or n > 4):
        raise UnsupportedSizeError(f"{n} qubits exceeds the supported maximum")
    if limit_size and len(states) > 2**n:
        raise UnsupportedSizeError(f"{len(states)} orthogonal states cannot live on {n} qubits")
    Fs = _factors(states, cfg)
    for a, b in itertools.combinations(Fs, 2):
        if np.max(np.abs(a.conj().T @ b)) > cfg.tol.orth:
            raise PreconditionError("states are not pairwise orthogonal")


def _search(items, remaining, ctx: _Ctx, depth: int):
    """Return ``(tree, certified)``; ``tree`` is None on failure."""
    ctx.nodes += 1
    if len(items) <= 1:
        return Leaf(items[0][0] if items else None), True
    m = len(remaining)
    cfg = ctx.cfg
    if m == 0:
        return None, True
    if ctx.nodes > ctx.max_nodes:
        ctx.budget_hit = True
        return None, False
    Fs = [F for _, F in items]
    total = 0
    for F in Fs:
        lo, _ = _lower_from_factor(F, cfg, full=False)
        total += lo
    if total > 2**m:
        ctx.pruned_schmidt += 1
        if depth == 0:
            ctx.log.append(f"Schmidt-sum lower bound {total} exceeds {2 ** m}")
        return None, True

    certified = True
    for j, party in enumerate(remaining):
        cs = _candidate_set(Fs, m, j, party, cfg)
        if cs.continuous:
            ctx.families += 1
            certified = False
            dirs = _sampled_bases(cs, Fs, m, j, cfg)
        else:
            dirs = [b.bloch for b in cs.bases]
        if depth == 0:
            ctx.log.append(f"party {party}: candidate set {cs.kind} ({len(dirs)} bases tried)")
        for r in dirs:
            basis = MeasurementBasis.from_bloch(party, r)
            if not _branches_orthogonal(Fs, m, j, basis.v, cfg.tol):
                continue
            kids = []
            ok = True
            for w in basis.outcomes():
                child = []
                for label, F in items:
                    c = collapse_array(F, m, j, w)
                    nrm = np.linalg.norm(c)
                    if nrm**2 > cfg.tol.vanish:
                        child.append((label, c / nrm))
                sub, cert = _search(child, remaining[:j] + remaining[j + 1 :], ctx, depth + 1)
                if sub is None:
                    certified = certified and cert
                    ok = False
                    break
                kids.append(sub)
            if ok:
                return Node(party, basis, tuple(kids), tuple(label for label, _ in items)), True
            if ctx.budget_hit:
                return None, False
    return None, certified


def decide(
    states: Sequence[StateLike],
    labels: Sequence[Hashable] | None = None,
    cfg: RunConfig | None = None,
    *,
    max_nodes: int = 200_000,
) -> Decision:
    """Decide perfect local distinguishability of orthogonal multi-qubit states."""
    cfg = cfg or RunConfig()
    states = [as_state(s) for s in states]
    _check_input(states, cfg)
    labels = list(range(len(states))) if labels is None else list(labels)
    if len(labels) != len(states) or len(set(labels)) != len(labels):
        raise PreconditionError("labels must be unique, one per state")
    n = states[0].n_qubits
    ctx = _Ctx(cfg, max_nodes)
    items = list(zip(labels, _factors(states, cfg)))
    tree, certified = _search(items, list(range(n)), ctx, 0)
    stats = {
        "nodes": ctx.nodes,
        "families_sampled": ctx.families,
        "schmidt_prunes": ctx.pruned_schmidt,
        "budget_exhausted": ctx.budget_hit,
    }
    if tree is not None:
        return Decision("Distinguishable", tree, [], False, stats)
    if certified and not ctx.budget_hit:
        return Decision("Indistinguishable", None, ctx.log, False, stats)
    caveat = ["failure involved sampled continuous candidate families"]
    if ctx.budget_hit:
        caveat = [f"node budget of {max_nodes} exhausted"]
    return Decision("Inconclusive", None, ctx.log + caveat, ctx.families > 0, stats)


def first_mover_exists(
    states: Sequence[StateLike], party: int = 0, cfg: RunConfig | None = None
) -> tuple[bool, MeasurementBasis | None]:
    """Whether ``party`` can open with an orthogonality-keeping measurement."""
    cfg = cfg or RunConfig()
    states = [as_state(s) for s in states]
    _check_input(states, cfg)
    n = states[0].n_qubits
    if not 0 <= party < n:
        raise IndexError(f"party {party} out of range for {n} qubits")
    Fs = _factors(states, cfg)
    cs = _candidate_set(Fs, n, party, party, cfg)
    if cs.kind == "Empty":
        return False, None
    dirs = _sampled_bases(cs, Fs, n, party, cfg) if cs.continuous else [b.bloch for b in cs.bases]
    for r in dirs:
        if _branches_orthogonal(Fs, n, party, from_bloch(r), cfg.tol):
            return True, MeasurementBasis.from_bloch(party, r)
    return False, None


# ---------------------------------------------------------------------------
# protocol checks


@dataclass
class ProtocolCheck:
    valid: bool
    success_probability: float
    partition: dict
    leakage: dict


def _walk(tree, n: int, path: str = "", seen: tuple = ()):
    """Yield ``(outcome string, leaf, [(party, vector), ...])`` for every leaf."""
    if isinstance(tree, Leaf):
        yield path, tree, []
        return
    if tree.party in seen:
        raise StructuralError(f"party {tree.party} measured twice on path {path!r}")
    if not 0 <= tree.party < n:
        raise StructuralError(f"party {tree.party} out of range")
    for bit, w in zip("01", tree.basis.outcomes()):
        for p, leaf, proj in _walk(tree.children[int(bit)], n, path + bit, seen + (tree.party,)):
            yield p, leaf, [(tree.party, w)] + proj


def _branch_weight(F: np.ndarray, n: int, proj) -> float:
    remaining = list(range(n))
    cur = F
    for party, w in proj:
        j = remaining.index(party)
        cur = collapse_array(cur, len(remaining), j, w)
        remaining.pop(j)
    return float(np.linalg.norm(cur) ** 2)


def verify_protocol(
    tree: ProtocolTree, states: Sequence[StateLike], labels: Sequence[Hashable] | None = None, tol: float = 1e-9
) -> ProtocolCheck:
    """Simulate every branch of ``tree`` on every state."""
    states = [as_state(s) for s in states]
    labels = list(range(len(states))) if labels is None else list(labels)
    n = states[0].n_qubits
    leaves = list(_walk(tree, n))
    partition: dict = {lab: [] for lab in labels}
    leakage: dict = {}
    total_ok = 0.0
    for lab, s in zip(labels, states):
        F = factor(s)
        F = F / np.linalg.norm(F)
        ok = 0.0
        for path, leaf, proj in leaves:
            w = _branch_weight(F, n, proj)
            if w <= tol:
                continue
            if leaf.label == lab and not leaf.failed:
                ok += w
                partition[lab].append(path)
            else:
                leakage.setdefault(lab, []).append(path)
        total_ok += ok
    prob = total_ok / len(states)
    valid = not leakage and prob >= 1 - tol
    return ProtocolCheck(valid, prob, partition, leakage)


@dataclass
class ProductBasis:
    states: dict[str, np.ndarray]
    blocks: dict


def protocol_to_product_basis(tree: ProtocolTree, n: int) -> ProductBasis:
    """The orthonormal product basis induced by ``tree``.

    Parties left unmeasured on a path are padded with the computational basis
    in ascending party order; outcome strings list bits in measurement order.
    """
    out: dict[str, np.ndarray] = {}
    blocks: dict = {}
    for path, leaf, proj in _walk(tree, n):
        local: dict[int, np.ndarray] = dict(proj)
        missing = [q for q in range(n) if q not in local]
        for bits in itertools.product("01", repeat=len(missing)):
            vecs = dict(local)
            for q, b in zip(missing, bits):
                vecs[q] = np.eye(2, dtype=complex)[int(b)]
            key = path + "".join(bits)
            out[key] = kron(*(vecs[q] for q in range(n)))
            blocks.setdefault(leaf.label, []).append(key)
    return ProductBasis(out, blocks)


def tree_to_dict(tree: ProtocolTree) -> dict:
    if isinstance(tree, Leaf):
        return {"leaf": tree.label, "failed": tree.failed}
    return {
        "party": tree.party,
        "bloch": [float(x) for x in tree.basis.bloch],
        "children": [tree_to_dict(c) for c in tree.children],
    }


def tree_parties(tree: ProtocolTree) -> list[tuple[int, np.ndarray]]:
    if isinstance(tree, Leaf):
        return []
    out = [(tree.party, tree.basis.bloch)]
    for c in tree.children:
        out += tree_parties(c)
    return out
