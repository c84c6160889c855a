"""Command-line front end: state/channel descriptors in, tables out.

Subcommands::

    moments           observables of an input or teleported state
    photon-stats      photon-number probabilities (columns n, P_in, P_out)
    compare           Delta sweep of D_N / fidelity / Frobenius for one input
    optimize          minimize one objective over Delta at fixed r
    sweep             optimize a list of objectives over an r grid
    transfer-surface  (w, z) grid of the transfer function for named presets

State descriptor grammar: ``fock:N``, ``coherent:RE[,IM]``, ``sqvac:S``,
``mix:N1@P1,N2@P2,...``.  Grids are ``start:stop:count`` or comma lists.
Options may come from a JSON config file (``--config``); explicit flags win.
Outputs are deterministic: fixed column orders, shortest round-trip decimals,
and a provenance comment (tool version + config hash) on every CSV.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .channel import teleport
from .errors import CVTeleportError, InvalidArgumentError
from .moments import moment_set
from .numerics import DiffConfig, QuadratureConfig
from .optimize import (
    OBJECTIVE_KINDS,
    Objective,
    closed_form_delta,
    minimize_delta,
    sweep_r,
)
from .photonstats import distortion_measures, input_distribution, output_photon_probs
from .states import (
    Channel,
    CoherentInput,
    FockInput,
    FockMixtureInput,
    InputState,
    SqueezedBellResource,
    SqueezedVacuumInput,
    state_from_descriptor,
    transfer_fn,
)

_FORMATS = ("csv", "json")


def parse_state(text: str) -> InputState:
    """Parse the compact state grammar used on the command line."""
    if isinstance(text, dict):
        return state_from_descriptor(text)
    try:
        kind, _, arg = text.partition(":")
        if kind == "fock":
            return FockInput(int(arg))
        if kind == "coherent":
            parts = [float(x) for x in arg.split(",")]
            if len(parts) == 1:
                return CoherentInput(complex(parts[0], 0.0))
            if len(parts) == 2:
                return CoherentInput(complex(parts[0], parts[1]))
            raise ValueError("coherent takes RE or RE,IM")
        if kind == "sqvac":
            return SqueezedVacuumInput(float(arg))
        if kind == "mix":
            weights = []
            for chunk in arg.split(","):
                n, _, p = chunk.partition("@")
                weights.append((int(n), float(p)))
            return FockMixtureInput(tuple(weights))
    except InvalidArgumentError:
        raise
    except Exception as exc:
        raise InvalidArgumentError(f"bad state descriptor {text!r}: {exc}") from exc
    raise InvalidArgumentError(
        f"bad state descriptor {text!r}; expected fock:N, coherent:RE[,IM], sqvac:S or mix:N@P,..."
    )


def parse_grid(text) -> list[float]:
    """Parse ``start:stop:count``, a comma list, or a single number."""
    if isinstance(text, (int, float)):
        return [float(text)]
    if isinstance(text, (list, tuple)):
        return [float(x) for x in text]
    try:
        if ":" in text:
            start, stop, count = text.split(":")
            count = int(count)
            if count < 1:
                raise ValueError("grid count must be >= 1")
            return [float(x) for x in np.linspace(float(start), float(stop), count)]
        return [float(x) for x in text.split(",")]
    except InvalidArgumentError:
        raise
    except Exception as exc:
        raise InvalidArgumentError(f"bad grid {text!r}: {exc}") from exc


def _fmt(value):
    """Shortest round-trip decimal for floats; pass everything else through."""
    if value is None:
        return ""
    if isinstance(value, (bool, int, str)):
        return value
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


_EXECUTION_KEYS = ("jobs", "output")


def _config_hash(resolved: dict) -> str:
    # Execution details (worker count, output path) do not alter the numbers
    # and stay out of the provenance hash.
    science = {k: v for k, v in resolved.items() if k not in _EXECUTION_KEYS}
    blob = json.dumps(science, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


def _emit(rows, columns, args, resolved):
    fmt = resolved.get("format") or "csv"
    if fmt not in _FORMATS:
        raise InvalidArgumentError(f"unknown output format {fmt!r}")
    if fmt == "json":
        payload = [{k: row[k] for k in columns} for row in rows]
        text = json.dumps(payload, indent=2, default=float) + "\n"
    else:
        buf = io.StringIO()
        buf.write(f"# cvteleport {__version__} config={_config_hash(resolved)}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row[k]) for k in columns])
        text = buf.getvalue()
    out_path = resolved.get("output")
    if out_path:
        with open(out_path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _resolve(args: argparse.Namespace) -> dict:
    """Merge config-file values under explicit flags; flags win."""
    file_cfg = {}
    if getattr(args, "config", None):
        with open(args.config) as fh:
            file_cfg = json.load(fh)
        if not isinstance(file_cfg, dict):
            raise InvalidArgumentError("config file must hold a JSON object")
    resolved = dict(file_cfg)
    for key, value in vars(args).items():
        if key in ("config", "func"):
            continue
        if value is not None:
            resolved[key] = value
    resolved.setdefault("format", "csv")
    if resolved.get("jobs") is None:
        resolved["jobs"] = int(os.environ.get("CVTELEPORT_JOBS", "1"))
    return resolved


def _quad_cfg(resolved: dict) -> QuadratureConfig:
    return QuadratureConfig(
        radial_nodes=int(resolved.get("radial_nodes") or 96),
        angular_nodes=int(resolved.get("angular_nodes") or 128),
        cutoff_radius=resolved.get("cutoff_radius") or "auto",
        target_abs_tol=float(resolved.get("quad_tol") or 1e-9),
    )


def _diff_cfg(resolved: dict) -> DiffConfig:
    return DiffConfig(
        step=float(resolved.get("fd_step") or 1e-3),
        richardson_levels=int(resolved.get("richardson_levels") or 3),
    )


def _channel_from(resolved: dict, delta=None) -> Channel:
    if delta is None:
        if resolved.get("delta") is None:
            raise InvalidArgumentError("a resource needs --delta (or --identity-channel)")
        delta = float(resolved["delta"])
    res = SqueezedBellResource(
        delta=delta, theta=float(resolved.get("theta") or 0.0), r=float(_single_r(resolved))
    )
    return Channel(res, gain=float(resolved.get("gain") or 1.0))


def _single_r(resolved: dict) -> float:
    if resolved.get("r") is None:
        raise InvalidArgumentError("missing --r")
    grid = parse_grid(resolved["r"])
    if len(grid) != 1:
        raise InvalidArgumentError("this command takes a single --r value")
    return grid[0]


def _input_state(resolved: dict) -> InputState:
    if resolved.get("input") is None:
        raise InvalidArgumentError("missing --input")
    return parse_state(resolved["input"])


def _run_jobs(worker, cells, jobs: int):
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(worker, cells))
    return [worker(c) for c in cells]


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def _cmd_moments(args, resolved):
    state = _input_state(resolved)
    if resolved.get("identity_channel"):
        ms = moment_set(state)
    else:
        ms = moment_set(teleport(state, _channel_from(resolved)))
    row = ms.to_dict()
    if (resolved.get("format") or "csv") == "json":
        out_path = resolved.get("output")
        text = json.dumps(row, indent=2, default=float) + "\n"
        if out_path:
            with open(out_path, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return
    columns = list(row.keys())
    _emit([row], columns, args, resolved)


def _cmd_photon_stats(args, resolved):
    state = _input_state(resolved)
    n_photons = int(resolved.get("N") or 24)
    p_in = input_distribution(state, n_photons)
    if resolved.get("identity_channel"):
        p_out = p_in
    else:
        out = teleport(state, _channel_from(resolved))
        p_out = output_photon_probs(out, n_photons, _quad_cfg(resolved))
    rows = [
        {"n": n, "P_in": float(p_in.probs[n]), "P_out": float(p_out.probs[n])}
        for n in range(n_photons + 1)
    ]
    _emit(rows, ["n", "P_in", "P_out"], args, resolved)


def _cmd_compare(args, resolved):
    state = _input_state(resolved)
    if resolved.get("delta_grid") is None:
        raise InvalidArgumentError("compare needs --delta-grid")
    deltas = parse_grid(resolved["delta_grid"])
    if not deltas:
        raise InvalidArgumentError("empty --delta-grid")
    n_photons = int(resolved.get("N") or 24)
    r = _single_r(resolved)
    theta = float(resolved.get("theta") or 0.0)
    gain = float(resolved.get("gain") or 1.0)
    qcfg = _quad_cfg(resolved)

    def cell(delta: float) -> dict:
        ch = Channel(SqueezedBellResource(delta=delta, theta=theta, r=r), gain=gain)
        meas = distortion_measures(state, teleport(state, ch), n_photons, qcfg)
        return {
            "delta": delta,
            "d_n": meas.d_n,
            "fidelity": meas.fidelity,
            "one_minus_fidelity": 1.0 - meas.fidelity,
            "frobenius": meas.frobenius,
        }

    rows = _run_jobs(cell, deltas, int(resolved["jobs"]))
    _emit(rows, ["delta", "d_n", "fidelity", "one_minus_fidelity", "frobenius"], args, resolved)


def _cmd_optimize(args, resolved):
    kind = resolved.get("kind")
    if kind is None:
        raise InvalidArgumentError("optimize needs --kind")
    state = parse_state(resolved["input"]) if resolved.get("input") is not None else None
    obj = Objective(
        kind=kind,
        r=_single_r(resolved),
        theta=float(resolved.get("theta") or 0.0),
        input=state,
        gain=float(resolved.get("gain") or 1.0),
        n_photons=int(resolved.get("N") or 24),
        quad_cfg=_quad_cfg(resolved),
        diff_cfg=_diff_cfg(resolved),
        use_fd=bool(resolved.get("use_fd")),
    )
    rec = minimize_delta(obj)
    rows = [
        {
            "kind": rec.kind,
            "r": rec.r,
            "delta_star": rec.delta_star,
            "objective_value": rec.objective_value,
            "iterations": rec.iterations,
        }
    ]
    _emit(rows, ["kind", "r", "delta_star", "objective_value", "iterations"], args, resolved)


def _cmd_sweep(args, resolved):
    kinds_text = resolved.get("kinds")
    if not kinds_text:
        raise InvalidArgumentError("sweep needs --kinds")
    kinds = kinds_text.split(",") if isinstance(kinds_text, str) else list(kinds_text)
    for kind in kinds:
        if kind not in OBJECTIVE_KINDS:
            raise InvalidArgumentError(f"unknown objective kind {kind!r}")
    if resolved.get("r_grid") is None:
        raise InvalidArgumentError("sweep needs --r-grid")
    r_grid = parse_grid(resolved["r_grid"])
    state = parse_state(resolved["input"]) if resolved.get("input") is not None else None
    theta = float(resolved.get("theta") or 0.0)
    gain = float(resolved.get("gain") or 1.0)
    n_photons = int(resolved.get("N") or 24)
    qcfg = _quad_cfg(resolved)
    dcfg = _diff_cfg(resolved)

    def cell(kr):
        kind, r = kr
        return sweep_r(
            [kind], [r], input=state, theta=theta, gain=gain,
            n_photons=n_photons, quad_cfg=qcfg, diff_cfg=dcfg,
            use_fd=bool(resolved.get("use_fd")),
        )[0]

    cells = [(kind, r) for kind in kinds for r in r_grid]
    records = _run_jobs(cell, cells, int(resolved["jobs"]))
    rows = [
        {
            "kind": rec.kind,
            "r": rec.r,
            "delta_star": rec.delta_star,
            "objective_value": rec.objective_value,
            "status": "ok" if rec.error is None else f"error: {rec.error}",
        }
        for rec in records
    ]
    _emit(rows, ["kind", "r", "delta_star", "objective_value", "status"], args, resolved)


_SURFACE_PRESETS = ("tmsv", "photon_subtracted", "photon_added", "coherent_optimal")


def _preset_delta(preset: str, r: float) -> float:
    """Delta value realizing each figure preset inside the Bell-like family."""
    if preset == "tmsv":
        return 1.0
    if preset == "photon_subtracted":
        return math.cos(math.atan(math.tanh(r)))
    if preset == "photon_added":
        return math.cos(math.atan(1.0 / math.tanh(r)))
    if preset == "coherent_optimal":
        return closed_form_delta("fidelity_coherent", r)
    raise InvalidArgumentError(f"unknown preset {preset!r}; expected one of {_SURFACE_PRESETS}")


def _cmd_transfer_surface(args, resolved):
    r = _single_r(resolved)
    theta = float(resolved.get("theta") or 0.0)
    gain = float(resolved.get("gain") or 1.0)
    presets_text = resolved.get("presets")
    presets = (
        presets_text.split(",") if isinstance(presets_text, str)
        else list(presets_text or _SURFACE_PRESETS)
    )
    axis = parse_grid(resolved.get("grid") or "-2:2:41")
    rows = []
    from .phasespace import PhasePoint

    for preset in presets:
        delta = _preset_delta(preset, r)
        tau = transfer_fn(
            Channel(SqueezedBellResource(delta=delta, theta=theta, r=r), gain=gain)
        )
        for w in axis:
            for z in axis:
                rows.append(
                    {
                        "preset": preset,
                        "delta": delta,
                        "w": w,
                        "z": z,
                        "tau": float(tau.fn(PhasePoint(w, z)).real),
                    }
                )
    _emit(rows, ["preset", "delta", "w", "z", "tau"], args, resolved)


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON config file; explicit flags override it")
    p.add_argument("--output", help="output file (default: stdout)")
    p.add_argument("--format", choices=_FORMATS, help="csv (default) or json")
    p.add_argument("--jobs", type=int, help="parallel sweep cells (default: $CVTELEPORT_JOBS or 1)")
    p.add_argument("--radial-nodes", dest="radial_nodes", type=int)
    p.add_argument("--angular-nodes", dest="angular_nodes", type=int)
    p.add_argument("--quad-tol", dest="quad_tol", type=float)
    p.add_argument("--fd-step", dest="fd_step", type=float)
    p.add_argument("--richardson-levels", dest="richardson_levels", type=int)


def _add_resource(p: argparse.ArgumentParser):
    p.add_argument("--delta", type=float)
    p.add_argument("--theta", type=float)
    p.add_argument("--r")
    p.add_argument("--gain", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cvteleport",
        description="Observable statistics of continuous-variable teleportation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("moments", help="moment set of an input or teleported state")
    p.add_argument("--input")
    p.add_argument("--identity-channel", dest="identity_channel", action="store_true", default=None)
    _add_resource(p)
    _add_common(p)
    p.set_defaults(func=_cmd_moments)

    p = sub.add_parser("photon-stats", help="photon-number probabilities")
    p.add_argument("--input")
    p.add_argument("--N", type=int)
    p.add_argument("--identity-channel", dest="identity_channel", action="store_true", default=None)
    _add_resource(p)
    _add_common(p)
    p.set_defaults(func=_cmd_photon_stats)

    p = sub.add_parser("compare", help="Delta sweep of distortion measures")
    p.add_argument("--input")
    p.add_argument("--N", type=int)
    p.add_argument("--delta-grid", dest="delta_grid")
    _add_resource(p)
    _add_common(p)
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("optimize", help="minimize one objective over Delta")
    p.add_argument("--kind", choices=OBJECTIVE_KINDS)
    p.add_argument("--input")
    p.add_argument("--N", type=int)
    p.add_argument("--use-fd", dest="use_fd", action="store_true", default=None)
    _add_resource(p)
    _add_common(p)
    p.set_defaults(func=_cmd_optimize)

    p = sub.add_parser("sweep", help="optimize objectives over an r grid")
    p.add_argument("--kinds")
    p.add_argument("--r-grid", dest="r_grid")
    p.add_argument("--input")
    p.add_argument("--N", type=int)
    p.add_argument("--theta", type=float)
    p.add_argument("--gain", type=float)
    p.add_argument("--use-fd", dest="use_fd", action="store_true", default=None)
    _add_common(p)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("transfer-surface", help="(w, z) grid of the transfer function")
    p.add_argument("--presets")
    p.add_argument("--grid")
    _add_resource(p)
    _add_common(p)
    p.set_defaults(func=_cmd_transfer_surface)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        resolved = _resolve(args)
        fmt = resolved.get("format") or "csv"
        if fmt not in _FORMATS:
            raise InvalidArgumentError(f"unknown output format {fmt!r}")
        args.func(args, resolved)
        return 0
    except (CVTeleportError, ValueError, OSError, KeyError) as exc:
        record = {"error": {"type": type(exc).__name__, "message": str(exc)}}
        sys.stderr.write(json.dumps(record) + "\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
