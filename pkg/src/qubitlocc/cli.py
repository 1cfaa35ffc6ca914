"""Command-line front end.

Exit codes: 0 distinguishable (or success for non-decision commands),
3 indistinguishable, 4 inconclusive, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from typing import Any, Sequence

import numpy as np

from .config import RunConfig, load_config
from .errors import QubitLoccError
from .statefile import load_state_file

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INDISTINGUISHABLE = 3
EXIT_INCONCLUSIVE = 4

VERDICT_EXIT = {"Distinguishable": EXIT_OK, "Indistinguishable": EXIT_INDISTINGUISHABLE, "Inconclusive": EXIT_INCONCLUSIVE}


def _num(x: float) -> float:
    return float(f"{x:.12g}")


def clean(obj: Any) -> Any:
    """JSON-ready copy with every number printed to 12 significant digits."""
    if isinstance(obj, dict):
        return {str(k): clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [_num(obj.real), _num(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        v = _num(float(obj))
        return 0.0 if v == 0 else v
    return obj


def _vec(v) -> list:
    return [[_num(z.real), _num(z.imag)] for z in np.asarray(v, dtype=complex).reshape(-1)]


# ---------------------------------------------------------------------------
# commands


def cmd_decide(args, cfg: RunConfig) -> tuple[int, dict]:
    from .lpmcc import decide, tree_to_dict, verify_protocol

    sf = load_state_file(args.file)
    dec = decide(sf.states, sf.labels, cfg)
    report = {
        "command": "decide",
        "verdict": dec.verdict,
        "protocol": None,
        "certificate": dec.certificate,
        "sampled_family": dec.sampled_family,
        "stats": dec.stats,
        "warnings": sf.warnings,
        "citations": ["projective local protocols suffice for orthogonal qubit states"],
    }
    if dec.tree is not None:
        check = verify_protocol(dec.tree, sf.states, sf.labels)
        report["protocol"] = tree_to_dict(dec.tree)
        report["partition"] = check.partition
        report["success_probability"] = check.success_probability
    elif dec.verdict == "Indistinguishable":
        report["citations"].append("protocol search exhausted every orthogonality-keeping measurement")
    return VERDICT_EXIT[dec.verdict], report


def _bounds_dict(b) -> dict:
    return {
        "lower": b.lower,
        "upper": b.upper,
        "exact": b.exact,
        "inconclusive": b.inconclusive,
        "witness": None if b.witness_upper is None else [_vec(w) for w in b.witness_upper],
        "reasons": list(b.notes),
    }


def cmd_schmidt(args, cfg: RunConfig) -> tuple[int, dict]:
    from .schmidt import schmidt_sum_criterion

    sf = load_state_file(args.file)
    crit = schmidt_sum_criterion(sf.states, cfg)
    report = {
        "command": "schmidt",
        "states": {lab: _bounds_dict(b) for lab, b in zip(sf.labels, crit.bounds)},
        "sum_lower": crit.sum_lower,
        "sum_upper": crit.sum_upper,
        "passes": crit.passes,
        "certified_indistinguishable": crit.certified_indistinguishable,
        "warnings": sf.warnings,
        "citations": ["sum of orthogonal Schmidt numbers bounded by the dimension"],
    }
    return EXIT_OK, report


def _span_vectors(states) -> list[np.ndarray]:
    from .qstate import support

    vecs = []
    for s in states:
        vecs += [np.asarray(v) for v in support(s).vectors]
    return vecs


def cmd_products(args, cfg: RunConfig) -> tuple[int, dict]:
    from .prodfind import product_states_in_subspace

    sf = load_state_file(args.file)
    res = product_states_in_subspace(_span_vectors(sf.states), cfg)
    report = {
        "command": "products",
        "hits": [
            {"vector": _vec(h.vector), "factors": [_vec(f) for f in h.factors], "residual": h.residual, "family_dim": h.family_dim}
            for h in res.hits
        ],
        "count": len(res.hits),
        "completeness": res.completeness,
        "notes": res.notes,
        "warnings": sf.warnings,
    }
    return EXIT_OK, report


def cmd_upb_check(args, cfg: RunConfig) -> tuple[int, dict]:
    from .prodfind import upb_check

    sf = load_state_file(args.file)
    res = upb_check(sf.states, cfg)
    report = {
        "command": "upb-check",
        "orthonormal_products": res.orthonormal_products,
        "unextendible": res.unextendible,
        "completeness": res.completeness,
        "complement_dim": res.complement_dim,
        "complement_product_hits": [_vec(h.vector) for h in res.complement_product_hits],
        "warnings": sf.warnings,
    }
    return EXIT_OK, report


def cmd_scan_basis(args, cfg: RunConfig) -> tuple[int, dict]:
    from .upb import UpbAngles, basis_scan

    try:
        angles = [float(x) for x in args.angles.split(",")]
    except ValueError:
        raise QubitLoccError("--angles must be three comma-separated numbers") from None
    if len(angles) != 3:
        raise QubitLoccError("--angles must be three comma-separated numbers")
    rep = basis_scan(UpbAngles(*angles), args.trials, args.seed, cfg)
    report = {
        "command": "scan-basis",
        "angles": list(rep.angles),
        "trials": rep.trials,
        "seed": rep.seed,
        "counts": rep.counts,
        "caveated_inconclusive": rep.caveated_inconclusive,
    }
    return EXIT_OK, report


def cmd_corpus(args, cfg: RunConfig) -> tuple[int, dict]:
    from .corpus import corpus_get

    entry = corpus_get(args.name)
    if args.emit:
        return EXIT_OK, entry.to_state_file()
    report = {
        "command": "corpus",
        "name": entry.name,
        "qubits": entry.n_qubits,
        "labels": entry.labels,
        "params": {k: (list(v) if isinstance(v, tuple) else v) for k, v in entry.params.items()},
        "expected": {k: {"value": e.value, "claim": e.claim} for k, e in entry.expected.items()},
    }
    return EXIT_OK, report


COMMANDS = {
    "decide": cmd_decide,
    "schmidt": cmd_schmidt,
    "products": cmd_products,
    "upb-check": cmd_upb_check,
    "scan-basis": cmd_scan_basis,
    "corpus": cmd_corpus,
}


# ---------------------------------------------------------------------------
# parsing and output


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file (default: $QUBITLOCC_CONFIG)")
    common.add_argument("--format", choices=["text", "json"], dest="output_format")
    common.add_argument("--seed", type=int)
    common.add_argument("--restarts", type=int)
    common.add_argument("--circle-samples", type=int)
    common.add_argument("--schmidt-restarts", type=int)
    common.add_argument("--max-qubits", type=int)
    common.add_argument("--tol", action="append", default=[], metavar="NAME=VALUE", help="override a tolerance, e.g. orth=1e-10")

    p = argparse.ArgumentParser(prog="qubitlocc", description="Local distinguishability of multi-qubit states.")
    sub = p.add_subparsers(dest="command", required=True)
    for name, helptext in [
        ("decide", "decide LOCC distinguishability of the states in FILE"),
        ("schmidt", "orthogonal Schmidt number bounds and the Schmidt-sum criterion"),
        ("products", "product states in the span of the states"),
        ("upb-check", "check whether the states form an unextendible (product) basis"),
    ]:
        sp = sub.add_parser(name, parents=[common], help=helptext)
        sp.add_argument("file")
    sp = sub.add_parser("scan-basis", parents=[common], help="random orthonormal bases of the span of the canonical UPB")
    sp.add_argument("--angles", required=True, help="theta1,theta2,theta3 in radians")
    sp.add_argument("--trials", type=int, default=50)
    sp = sub.add_parser("corpus", parents=[common], help="show or export a named construction")
    sp.add_argument("name")
    sp.add_argument("--emit", action="store_true", help="print the entry as a state file")
    return p


def _config_from_args(args) -> RunConfig:
    cfg = load_config(args.config)
    updates = {}
    for key in ("output_format", "seed", "restarts", "circle_samples", "schmidt_restarts", "max_qubits"):
        val = getattr(args, key, None)
        if val is not None:
            updates[key] = val
    tol = cfg.tol
    for item in args.tol:
        name, _, value = item.partition("=")
        if not hasattr(tol, name):
            raise QubitLoccError(f"unknown tolerance {name!r}")
        tol = replace(tol, **{name: float(value)})
    return replace(cfg, tol=tol, **updates)


def _text(report: dict, indent: int = 0) -> list[str]:
    lines = []
    pad = "  " * indent
    for key, val in report.items():
        if isinstance(val, dict) and val:
            lines.append(f"{pad}{key}:")
            lines += _text(val, indent + 1)
        elif isinstance(val, list) and val and isinstance(val[0], dict):
            lines.append(f"{pad}{key}:")
            for i, item in enumerate(val):
                lines.append(f"{pad}  [{i}]")
                lines += _text(item, indent + 2)
        else:
            lines.append(f"{pad}{key}: {json.dumps(val)}")
    return lines


def run_command(argv: Sequence[str]) -> tuple[int, str]:
    """Run one command; returns the exit code and the rendered report."""
    parser = build_parser()
    args = parser.parse_args(list(argv))
    try:
        cfg = _config_from_args(args)
        if args.command == "scan-basis" and args.seed is None:
            args.seed = cfg.seed
        code, report = COMMANDS[args.command](args, cfg)
    except (QubitLoccError, OSError, ValueError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc)
        return EXIT_INPUT, f"error: {msg}"
    report = clean(report)
    if args.command == "corpus" and args.emit:
        return code, json.dumps(report, sort_keys=True)
    if cfg.output_format == "json":
        return code, json.dumps(report, sort_keys=True, indent=2)
    return code, "\n".join(_text(report))


def main(argv: Sequence[str] | None = None) -> int:
    code, out = run_command(sys.argv[1:] if argv is None else argv)
    stream = sys.stderr if code == EXIT_INPUT else sys.stdout
    print(out, file=stream)
    return code


if __name__ == "__main__":
    sys.exit(main())
