"""Numerical tolerances and run configuration."""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

CONFIG_ENV_VAR = "QUBITLOCC_CONFIG"


@dataclass(frozen=True)
class Tolerances:
    norm: float = 1e-9
    herm: float = 1e-9
    orth: float = 1e-9
    rank: float = 1e-8
    plane: float = 1e-8
    vanish: float = 1e-10
    prod: float = 1e-9


DEFAULT_TOL = Tolerances()


@dataclass(frozen=True)
class RunConfig:
    """Knobs for the searches; every field has a documented default."""

    tol: Tolerances = field(default_factory=Tolerances)
    circle_samples: int = 64
    restarts: int = 512
    schmidt_restarts: int = 64
    seed: int = 0
    max_qubits: int = 4
    output_format: str = "text"

    def __post_init__(self):
        if self.circle_samples < 1 or self.restarts < 1 or self.schmidt_restarts < 1:
            raise ValueError("sample and restart counts must be positive")
        if self.seed < 0:
            raise ValueError("seed must be an unsigned integer")
        if self.output_format not in ("text", "json"):
            raise ValueError(f"unknown output format {self.output_format!r}")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        data = dict(data)
        tol = data.pop("tol", {}) or {}
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(tol=replace(DEFAULT_TOL, **tol), **data)


def load_config(path: str | os.PathLike | None = None) -> RunConfig:
    """Read a JSON config file; falls back to ``$QUBITLOCC_CONFIG`` then defaults."""
    if path is None:
        path = os.environ.get(CONFIG_ENV_VAR)
    if not path:
        return RunConfig()
    with Path(path).open() as fh:
        return RunConfig.from_dict(json.load(fh))
