"""Command-line front end: measure queries and collapse-race experiments.

One JSON config document describes the experiment; subcommands pick what
to do with it. Exit codes: 0 success, 2 config parse or validation
failure, 3 capacity error, 4 integration failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from .collapse import (
    CouplingSpec,
    IntegratorConfig,
    LindbladBasis,
    evolve,
    race,
    transverse_field,
)
from .errors import CapacityError, IntegrationFailureError
from .qii import compute_qii, qii_profile
from .states import StateSpec

_COMMANDS = ("qii", "profile", "evolve", "race")


class ConfigError(ValueError):
    """Configuration document failed to parse or validate."""


def _fmt(x: float) -> str:
    return "inf" if math.isinf(x) else f"{x:.9f}"


def _json_safe(x):
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    return x


def _check_keys(doc: dict, where: str, required=(), optional=()) -> None:
    if not isinstance(doc, dict):
        raise ConfigError(f"{where} must be a JSON object")
    allowed = set(required) | set(optional)
    unknown = sorted(set(doc) - allowed)
    if unknown:
        raise ConfigError(f"unknown fields in {where}: {unknown}")
    missing = sorted(set(required) - set(doc))
    if missing:
        raise ConfigError(f"missing required fields in {where}: {missing}")


def _parse_states(doc, seed: int) -> list[StateSpec]:
    if not isinstance(doc, list) or not doc:
        raise ConfigError("states must be a non-empty array of state specs")
    specs = []
    for i, entry in enumerate(doc):
        if not isinstance(entry, dict):
            raise ConfigError(f"states[{i}] must be an object")
        if entry.get("kind") in ("random_pure", "random_mixed"):
            params = dict(entry.get("params", {}))
            params.setdefault("seed", seed)
            entry = {**entry, "params": params}
        try:
            specs.append(StateSpec.from_json_dict(entry))
        except ValueError as exc:
            raise ConfigError(f"states[{i}]: {exc}") from exc
    return specs


def _parse_hamiltonian(doc, dim: int, n_sites: int):
    if doc is None or doc == "zero":
        return None
    if isinstance(doc, dict) and doc.get("kind") == "transverse_field":
        _check_keys(doc, "hamiltonian", required=("kind", "g"))
        ham = transverse_field(n_sites, float(doc["g"]))
        if ham.shape[0] != dim:
            raise ConfigError("transverse_field preset requires qubit sites")
        return ham
    if isinstance(doc, dict) and doc.get("kind") == "matrix":
        _check_keys(doc, "hamiltonian", required=("kind", "matrix"))
        try:
            re = np.asarray(doc["matrix"]["re"], dtype=float)
            im = np.asarray(doc["matrix"]["im"], dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"hamiltonian.matrix: {exc}") from exc
        ham = re + 1j * im
        if ham.shape != (dim, dim):
            raise ConfigError(f"hamiltonian shape {ham.shape} does not match dimension {dim}")
        return ham
    raise ConfigError(
        'hamiltonian must be "zero", {"kind": "transverse_field", "g": ...} '
        'or {"kind": "matrix", "matrix": {...}}'
    )


def _parse_basis(doc, dim: int) -> LindbladBasis:
    if doc is None or doc == "site_projectors":
        return LindbladBasis.site_projectors(dim)
    if doc == "gell_mann":
        return LindbladBasis.gell_mann(dim)
    if isinstance(doc, dict) and set(doc) == {"custom"}:
        ops = doc["custom"]
        if not isinstance(ops, list) or not ops:
            raise ConfigError("basis.custom must be a non-empty array of matrices")
        mats = []
        for i, entry in enumerate(ops):
            try:
                mats.append(
                    np.asarray(entry["re"], dtype=float) + 1j * np.asarray(entry["im"], dtype=float)
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise ConfigError(f"basis.custom[{i}]: {exc}") from exc
        try:
            basis = LindbladBasis.custom(mats)
        except ValueError as exc:
            raise ConfigError(f"basis.custom: {exc}") from exc
        if basis.dim != dim:
            raise ConfigError(f"basis dimension {basis.dim} does not match state dimension {dim}")
        return basis
    raise ConfigError('basis must be "site_projectors", "gell_mann" or {"custom": [...]}')


def _parse_coupling(doc) -> CouplingSpec:
    if doc is None:
        raise ConfigError("coupling section is required for dynamics commands")
    _check_keys(doc, "coupling", required=("kind",), optional=("lambda", "table"))
    kind = doc["kind"]
    try:
        if kind == "diagonal_linear":
            return CouplingSpec(kind="diagonal_linear", lam=float(doc.get("lambda", 0.0)))
        if kind == "custom_table":
            rows = doc.get("table")
            if not isinstance(rows, list) or not rows:
                raise ConfigError("coupling.table must be a non-empty array")
            table = []
            for i, row in enumerate(rows):
                _check_keys(row, f"coupling.table[{i}]", required=("phi", "matrix"))
                mat = np.asarray(row["matrix"]["re"], dtype=float) + 1j * np.asarray(
                    row["matrix"]["im"], dtype=float
                )
                table.append((float(row["phi"]), mat))
            return CouplingSpec(
                kind="custom_table",
                lam=float(doc.get("lambda", 0.0)),
                table=tuple(table),
            )
    except ConfigError:
        raise
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"coupling: {exc}") from exc
    raise ConfigError(f"unknown coupling kind {kind!r}")


def _parse_integrator(doc) -> IntegratorConfig:
    if doc is None:
        raise ConfigError("integrator section is required for dynamics commands")
    _check_keys(
        doc,
        "integrator",
        required=("dt", "t_end"),
        optional=("phi_refresh_stride", "qii_strategy", "record_stride", "store_states"),
    )
    try:
        return IntegratorConfig(
            dt=float(doc["dt"]),
            t_end=float(doc["t_end"]),
            phi_refresh_stride=int(doc.get("phi_refresh_stride", 1)),
            qii_strategy=str(doc.get("qii_strategy", "all_partitions")),
            record_stride=int(doc.get("record_stride", 1)),
            store_states=bool(doc.get("store_states", False)),
        )
    except ValueError as exc:
        raise ConfigError(f"integrator: {exc}") from exc


def _parse_output(doc) -> tuple[str | None, str]:
    if doc is None:
        return None, "csv"
    _check_keys(doc, "output", optional=("path", "format"))
    fmt = doc.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError(f'output.format must be "csv" or "json", got {fmt!r}')
    path = doc.get("path")
    if path is not None and not isinstance(path, str):
        raise ConfigError("output.path must be a string")
    return path, fmt


def _load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a JSON object")
    return doc


def _apply_overrides(doc: dict, overrides: list[str]) -> dict:
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        key, raw = item.split("=", 1)
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        tokens = key.split(".")
        target = doc
        for i, tok in enumerate(tokens[:-1]):
            nxt = tokens[i + 1]
            if isinstance(target, list):
                try:
                    target = target[int(tok)]
                except (ValueError, IndexError) as exc:
                    raise ConfigError(f"override path {key!r}: bad index {tok!r}") from exc
            elif isinstance(target, dict):
                if tok not in target:
                    target[tok] = [] if nxt.isdigit() else {}
                target = target[tok]
            else:
                raise ConfigError(f"override path {key!r} descends into a scalar")
        last = tokens[-1]
        if isinstance(target, list):
            try:
                target[int(last)] = value
            except (ValueError, IndexError) as exc:
                raise ConfigError(f"override path {key!r}: bad index {last!r}") from exc
        elif isinstance(target, dict):
            target[last] = value
        else:
            raise ConfigError(f"override path {key!r} descends into a scalar")
    return doc


def _out_path(outdir: str, base: str | None, default: str, index: int | None, count: int) -> str:
    name = base if base else default
    if index is not None and count > 1:
        stem, dot, suffix = name.rpartition(".")
        if dot:
            name = f"{stem}_{index}.{suffix}"
        else:
            name = f"{name}_{index}"
    return os.path.join(outdir, name)


def _write_json(path: str, doc) -> None:
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _strategy_of(cfg: dict) -> str:
    integ = cfg.get("integrator")
    if isinstance(integ, dict) and "qii_strategy" in integ:
        return str(integ["qii_strategy"])
    return "all_partitions"


def _cmd_qii(cfg: dict, outdir: str, threads: int) -> None:
    specs = _parse_states(cfg["states"], int(cfg.get("seed", 0)))
    path, _ = _parse_output(cfg.get("output"))
    strategy = _strategy_of(cfg)
    for i, spec in enumerate(specs):
        result = compute_qii(spec.resolve(), strategy)
        doc = {"state": spec.to_json_dict(), **result.to_json_dict()}
        _write_json(_out_path(outdir, path, "qii_result.json", i, len(specs)), doc)
        print(
            f"state[{i}] kind={spec.kind} phi_bits={_fmt(result.phi_bits)} "
            f"mip={result.mip.text()} strategy={result.strategy}"
        )


def _cmd_profile(cfg: dict, outdir: str, threads: int) -> None:
    specs = _parse_states(cfg["states"], int(cfg.get("seed", 0)))
    path, _ = _parse_output(cfg.get("output"))
    for i, spec in enumerate(specs):
        profile = qii_profile(spec.resolve())
        doc = {
            "state": spec.to_json_dict(),
            "profile": [{"block_count": b, "min_bits": v} for b, v in profile],
        }
        _write_json(_out_path(outdir, path, "profile.json", i, len(specs)), doc)
        print(f"state[{i}] kind={spec.kind}")
        for b, v in profile:
            print(f"  blocks={b} min_bits={_fmt(v)}")


def _trajectory_json(rec) -> dict:
    doc = {
        "times": rec.times.tolist(),
        "phi_bits": rec.phi_series.tolist(),
        "purity": rec.purity_series.tolist(),
        "coherence_l1": rec.coherence_series.tolist(),
        "max_trace_drift": rec.max_trace_drift,
        "final_state": rec.final_state.to_json_dict(),
    }
    if rec.fidelity_series is not None:
        doc["fidelity"] = rec.fidelity_series.tolist()
    return doc


def _dynamics_pieces(cfg: dict, specs: list[StateSpec]):
    dim = specs[0].local_dim ** specs[0].n_sites
    ham = _parse_hamiltonian(cfg.get("hamiltonian"), dim, specs[0].n_sites)
    basis = _parse_basis(cfg.get("basis"), dim)
    coupling = _parse_coupling(cfg.get("coupling"))
    config = _parse_integrator(cfg.get("integrator"))
    return ham, basis, coupling, config


def _cmd_evolve(cfg: dict, outdir: str, threads: int) -> None:
    specs = _parse_states(cfg["states"], int(cfg.get("seed", 0)))
    if len(specs) != 1:
        raise ConfigError("evolve takes exactly one state")
    path, fmt = _parse_output(cfg.get("output"))
    ham, basis, coupling, config = _dynamics_pieces(cfg, specs)
    rec = evolve(specs[0].resolve(), ham, basis, coupling, config)
    if fmt == "json":
        _write_json(_out_path(outdir, path, "trajectory.json", None, 1), _trajectory_json(rec))
    else:
        rec.write_csv(_out_path(outdir, path, "trajectory.csv", None, 1))
    print(
        f"steps={config.n_steps} final_phi={_fmt(float(rec.phi_series[-1]))} "
        f"final_coherence={_fmt(float(rec.coherence_series[-1]))} "
        f"max_trace_drift={rec.max_trace_drift:.3e}"
    )


def _cmd_race(cfg: dict, outdir: str, threads: int) -> None:
    specs = _parse_states(cfg["states"], int(cfg.get("seed", 0)))
    path, fmt = _parse_output(cfg.get("output"))
    ham, basis, coupling, config = _dynamics_pieces(cfg, specs)
    entries = race(specs, ham, basis, coupling, config, threads=threads)
    base = path if path else "race"
    summary = []
    for i, entry in enumerate(entries):
        if fmt == "json":
            traj_name = f"{base}_state{i}.json"
            _write_json(os.path.join(outdir, traj_name), _trajectory_json(entry.trajectory))
        else:
            traj_name = f"{base}_state{i}.csv"
            entry.trajectory.write_csv(os.path.join(outdir, traj_name))
        summary.append(
            {
                "state": entry.spec.to_json_dict(),
                "trajectory": traj_name,
                "half_coherence_time": _json_safe(entry.half_coherence_time),
            }
        )
        print(
            f"state[{i}] kind={entry.spec.kind} "
            f"half_coherence_time={_fmt(entry.half_coherence_time)}"
        )
    _write_json(os.path.join(outdir, f"{base}_summary.json"), {"entries": summary})


_DISPATCH = {
    "qii": _cmd_qii,
    "profile": _cmd_profile,
    "evolve": _cmd_evolve,
    "race": _cmd_race,
}

_TOP_KEYS = (
    "command",
    "states",
    "hamiltonian",
    "basis",
    "coupling",
    "integrator",
    "output",
    "seed",
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qphi",
        description="Integrated-information measures and collapse races for quantum states.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("qii", "compute the measure and minimum information partition per state"),
        ("profile", "minimum measure value per partition block count"),
        ("evolve", "integrate the measure-coupled master equation"),
        ("race", "evolve several states and compare coherence half-lives"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="path to the JSON experiment config")
        p.add_argument(
            "--override",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="dotted-path config override, value parsed as JSON when possible",
        )
        p.add_argument("--output-dir", default=".", help="directory for result files")
        p.add_argument(
            "--threads",
            type=int,
            default=0,
            help="worker threads for race trajectories (0 = auto)",
        )
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _load_config(args.config)
        cfg = _apply_overrides(cfg, args.override)
        _check_keys(cfg, "config", required=("states",), optional=[k for k in _TOP_KEYS if k != "states"])
        declared = cfg.get("command")
        if declared is not None and declared != args.command:
            raise ConfigError(
                f"config declares command {declared!r} but {args.command!r} was invoked"
            )
        threads = args.threads if args.threads > 0 else (os.cpu_count() or 1)
        os.makedirs(args.output_dir, exist_ok=True)
        _DISPATCH[args.command](cfg, args.output_dir, threads)
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return 3
    except IntegrationFailureError as exc:
        print(f"integration failure: {exc}", file=sys.stderr)
        return 4
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
