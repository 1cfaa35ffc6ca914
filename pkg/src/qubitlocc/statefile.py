"""JSON state files shared by the corpus export and the command line.

Layout::

    {"qubits": n,
     "states": [{"label": "a", "kind": "pure", "amps": [[re, im], ...]},
                {"label": "b", "kind": "mixed", "matrix": [[[re, im], ...], ...]}]}

Amplitudes are big-endian (qubit 0 is the most significant bit).
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .errors import InvalidStateError
from .qstate import DensityOperator, PureState, as_state


@dataclass
class StateFile:
    n_qubits: int
    labels: list[str]
    states: list[PureState | DensityOperator]
    warnings: list[str] = field(default_factory=list)


def _complex_array(data: Any, shape: tuple[int, ...], what: str) -> np.ndarray:
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidStateError(f"{what}: entries must be [re, im] number pairs") from exc
    if arr.shape != shape + (2,):
        raise InvalidStateError(f"{what}: expected shape {shape} of [re, im] pairs, got {arr.shape[:-1]}")
    if not np.all(np.isfinite(arr)):
        raise InvalidStateError(f"{what}: non-finite entry")
    return arr[..., 0] + 1j * arr[..., 1]


def parse_state_file(doc: dict, tol: float = 1e-9) -> StateFile:
    if not isinstance(doc, dict) or "qubits" not in doc or "states" not in doc:
        raise InvalidStateError("state file needs top-level 'qubits' and 'states'")
    n = doc["qubits"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise InvalidStateError("'qubits' must be a positive integer")
    dim = 2**n
    labels, states, warnings = [], [], []
    if not isinstance(doc["states"], list) or not doc["states"]:
        raise InvalidStateError("'states' must be a nonempty list")
    for i, entry in enumerate(doc["states"]):
        if not isinstance(entry, dict):
            raise InvalidStateError(f"state {i} is not an object")
        label = str(entry.get("label", i))
        kind = entry.get("kind")
        if kind == "pure":
            amps = _complex_array(entry.get("amps"), (dim,), f"state {label!r}")
            nrm = np.linalg.norm(amps)
            if nrm == 0:
                raise InvalidStateError(f"state {label!r} is the zero vector")
            if abs(nrm - 1) > tol:
                warnings.append(f"state {label!r} normalized on ingest (norm {nrm:.6g})")
                amps = amps / nrm
            states.append(PureState(amps))
        elif kind == "mixed":
            mat = _complex_array(entry.get("matrix"), (dim, dim), f"state {label!r}")
            rho = DensityOperator(mat)
            if abs(rho.trace - 1) > tol:
                warnings.append(f"state {label!r} normalized on ingest (trace {rho.trace:.6g})")
                rho = rho.normalized()
            states.append(rho)
        else:
            raise InvalidStateError(f"state {label!r}: kind must be 'pure' or 'mixed'")
        labels.append(label)
    if len(set(labels)) != len(labels):
        raise InvalidStateError("state labels must be unique")
    return StateFile(n, labels, states, warnings)


def load_state_file(path: str | os.PathLike) -> StateFile:
    try:
        with Path(path).open() as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InvalidStateError(f"{path}: not valid JSON ({exc.msg})") from exc
    return parse_state_file(doc)


def _pairs(a: np.ndarray) -> list:
    return np.stack([a.real, a.imag], axis=-1).tolist()


def to_state_file(states: Sequence, labels: Sequence | None = None) -> dict:
    states = [as_state(s) for s in states]
    labels = [str(k) for k in range(len(states))] if labels is None else [str(x) for x in labels]
    out = []
    for label, s in zip(labels, states):
        if isinstance(s, PureState):
            out.append({"label": label, "kind": "pure", "amps": _pairs(s.amplitudes)})
        else:
            out.append({"label": label, "kind": "mixed", "matrix": _pairs(s.matrix)})
    return {"qubits": states[0].n_qubits, "states": out}
