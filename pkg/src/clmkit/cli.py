"""``clm`` command-line front end.

Subcommands: ``build``, ``spectrum``, ``ansatz``, ``drive``, ``evolve`` and
``scenario``.  Parameters resolve as flags > ``--config`` JSON file >
defaults.  Exit codes: 0 success, 1 engine failure, 2 usage error
(including parameter values the model builders reject).  The
``CLM_SEED`` environment variable supplies the default seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analytics import (
    ChainParams,
    Lattice2dParams,
    best_k_1d,
    best_k_2d,
    bounds_for,
    descriptor_record,
    format_record,
    lattice_clm_1d,
    lattice_clm_2d,
)
from .dynamics import gaussian_moments_predicted
from .errors import ClmError, InvalidSpecError, UsageError
from .export import export
from .lattice import export_matrix_text
from .response import frequency_sweep, sweep_metrics
from .scenarios import PRESETS, SCENARIOS, ScenarioSpec, _coerce, build_model, evolve_packet, run_scenario
from .spectral import eig, spectrum_table

__all__ = ["main", "default_seed"]

_MODEL = dict(model="2d", Lx=30, Ly=30, tx=1.0, ty=1.0, N=400, t=1.0, B=0.6, mass="linear")
_SWEEP = dict(omega_min=-8.0, omega_max=8.0, omega_steps=21, gamma=1.9, kappa=0.2)
DEFAULTS = {
    "build": dict(_MODEL),
    "spectrum": dict(_MODEL, backend="native", format="csv"),
    "ansatz": dict(_MODEL, kx=None, ky=None, k=None, qx=0.0, qy=0.0, q=0.0, E="0"),
    "drive": dict(_MODEL, **_SWEEP, model="nonreciprocal", B=0.05, format="csv"),
    "evolve": dict({k: v for k, v in PRESETS["figS1a"]["full"].items()}, format="csv"),
    "scenario": dict(scale="desk"),
}
_FLOAT_OR_NONE = ("kx", "ky", "k")


def default_seed() -> int:
    """Seed from ``CLM_SEED`` (default 1)."""
    raw = os.environ.get("CLM_SEED")
    if raw is None or raw == "":
        return 1
    try:
        s = int(raw)
    except ValueError:
        raise UsageError(f"CLM_SEED must be an integer, got {raw!r}") from None
    if not 0 <= s < 2**64:
        raise UsageError("CLM_SEED must be an unsigned 64-bit integer")
    return s


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _model_flags(p):
    g = p.add_argument_group("model")
    g.add_argument("--model", choices=("2d", "nonreciprocal", "gainloss"))
    g.add_argument("--Lx", type=int)
    g.add_argument("--Ly", type=int)
    g.add_argument("--tx", type=float)
    g.add_argument("--ty", type=float)
    g.add_argument("--N", type=int)
    g.add_argument("--t", type=float)
    g.add_argument("--B", type=float)
    g.add_argument("--mass", choices=("linear", "random"))


def _common(p, fmt=True):
    p.add_argument("--seed", type=int)
    p.add_argument("--config", type=Path, help="JSON file with a flat parameter map")
    p.add_argument("--out", type=Path)
    if fmt:
        p.add_argument("--format", choices=("csv", "json", "svg"))


def _parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="clm", description="Continuum Landau mode toolkit", argument_default=argparse.SUPPRESS)
    ap.add_argument("--version", action="version", version=f"clm {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("build", help="build a Hamiltonian and write it as text", argument_default=argparse.SUPPRESS)
    _model_flags(p)
    _common(p, fmt=False)

    p = sub.add_parser("spectrum", help="eigendecomposition and spectrum table", argument_default=argparse.SUPPRESS)
    _model_flags(p)
    p.add_argument("--backend", choices=("native", "lapack"))
    _common(p)

    p = sub.add_parser("ansatz", help="CLM descriptor at a momentum", argument_default=argparse.SUPPRESS)
    _model_flags(p)
    for name in ("kx", "ky", "k", "qx", "qy", "q"):
        p.add_argument(f"--{name}", type=float)
    p.add_argument("--E", help="complex energy, e.g. 1+0.5j")
    _common(p, fmt=False)

    p = sub.add_parser("drive", help="driven steady-state frequency sweep", argument_default=argparse.SUPPRESS)
    _model_flags(p)
    p.add_argument("--omega-min", dest="omega_min", type=float)
    p.add_argument("--omega-max", dest="omega_max", type=float)
    p.add_argument("--omega-steps", dest="omega_steps", type=int)
    p.add_argument("--gamma", type=float)
    p.add_argument("--kappa", type=float)
    _common(p)

    p = sub.add_parser("evolve", help="gaussian packet evolution against the closed form", argument_default=argparse.SUPPRESS)
    for name in ("alpha", "beta", "x0", "y0", "qx", "qy", "B", "dt", "T", "h"):
        p.add_argument(f"--{name}", type=float)
    for name in ("nx", "ny", "record_every"):
        p.add_argument(f"--{name.replace('_', '-')}", dest=name, type=int)
    _common(p)

    p = sub.add_parser("scenario", help="regenerate a scenario's data bundle", argument_default=argparse.SUPPRESS)
    p.add_argument("name", nargs="?", choices=SCENARIOS, default=None)
    p.add_argument("--scale", choices=("desk", "full"))
    p.add_argument("--set", dest="overrides", action="append", metavar="KEY=VALUE", help="override a preset parameter")
    _model_flags(p)
    for name in ("omega_min", "omega_max", "gamma", "kappa", "dt", "T"):
        p.add_argument(f"--{name.replace('_', '-')}", dest=name, type=float)
    p.add_argument("--omega-steps", dest="omega_steps", type=int)
    _common(p, fmt=False)
    return ap


def _load_config(path) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as e:
        raise UsageError(f"cannot read config {path}: {e}") from None
    except json.JSONDecodeError as e:
        raise UsageError(f"config {path} is not valid JSON: {e}") from None
    if not isinstance(data, dict):
        raise UsageError("config must be a JSON object")
    data.pop("schema_version", None)
    return data


def _resolve(command: str, args: dict) -> dict:
    """Merge defaults, config file and flags, type-checking the file values."""
    cfg = _load_config(args.pop("config")) if "config" in args else {}
    out = dict(DEFAULTS[command])
    extra = {"seed", "out"}
    for k, v in cfg.items():
        if k not in out and k not in extra:
            raise UsageError(f"unknown config key {k!r} for '{command}'")
        if k in _FLOAT_OR_NONE and v is not None:
            out[k] = _coerce(k, v, 0.0)
        elif k == "seed":
            out[k] = _coerce(k, v, 0)
        elif k == "out":
            out[k] = Path(_coerce(k, v, ""))
        elif k == "E" and isinstance(v, (int, float)) and not isinstance(v, bool):
            out[k] = str(v)
        elif out[k] is not None:
            out[k] = _coerce(k, v, out[k])
    out.update(args)
    out.setdefault("seed", default_seed())
    if not 0 <= out["seed"] < 2**64:
        raise UsageError("seed must be an unsigned 64-bit integer")
    return out


def _model_params(p):
    if p["model"] == "2d":
        return dict(Lx=p["Lx"], Ly=p["Ly"], tx=p["tx"], ty=p["ty"], B=p["B"])
    return dict(model=p["model"], mass=p["mass"], N=p["N"], t=p["t"], B=p["B"])


def _need_out(p):
    if "out" not in p:
        raise UsageError("--out is required")
    return Path(p["out"])


def _parse_complex(s: str) -> complex:
    try:
        return complex(str(s).replace(" ", "").replace("i", "j"))
    except ValueError:
        raise UsageError(f"cannot parse complex energy {s!r}") from None


def _cmd_build(p):
    H = build_model(_model_params(p), p["seed"])
    out = _need_out(p)
    export_matrix_text(H, out)
    print(f"wrote {out} ({H.model_tag}, n={H.n})")


def _cmd_spectrum(p):
    H = build_model(_model_params(p), p["seed"])
    dec = eig(H, backend=p["backend"])
    table = spectrum_table(H, dec)
    out = _need_out(p)
    opts = {"bounds": bounds_for(H)} if p["format"] == "svg" else {}
    export(table, p["format"], out, **opts)
    rel = float(dec.residuals.max() / max(H.frobenius_norm(), 1e-300))
    inside = float(np.mean(bounds_for(H).contains(dec.values)))
    print(f"wrote {out}: {H.n} states, max residual/||H|| = {rel:.3g}, fraction in bounds = {inside:.4f}")


def _cmd_ansatz(p):
    E = _parse_complex(p["E"])
    if p["model"] == "2d":
        prm = Lattice2dParams(p["tx"], p["ty"], p["B"])
        k0 = best_k_2d(prm)
        k = (k0[0] if p["kx"] is None else p["kx"], k0[1] if p["ky"] is None else p["ky"])
        desc = lattice_clm_2d(prm, k, (p["qx"], p["qy"]), E)
    else:
        prm = ChainParams(p["t"], p["B"])
        k = best_k_1d(prm, p["model"]) if p["k"] is None else p["k"]
        desc = lattice_clm_1d(prm, p["model"], k, p["q"], E)
    text = format_record(descriptor_record(desc))
    if "out" in p:
        Path(p["out"]).write_text(text)
    sys.stdout.write(text)


def _cmd_drive(p):
    if p["model"] == "2d":
        raise UsageError("drive needs --model nonreciprocal or gainloss")
    H = build_model(_model_params(p), p["seed"])
    omegas = np.linspace(p["omega_min"], p["omega_max"], p["omega_steps"])
    sw = frequency_sweep(H, omegas, p["kappa"], p["gamma"], p["seed"])
    out = _need_out(p)
    export(sw, p["format"], out)
    m = sweep_metrics(sw) if sw.omegas.size >= 5 else {}
    summary = {k: m[k] for k in ("rainbow_slope", "rainbow_r2", "funnel_fraction", "peak_omega_correlation") if k in m}
    print(json.dumps(dict(out=str(out), seed=p["seed"], **summary)))


def _cmd_evolve(p):
    keys = PRESETS["figS1a"]["full"]
    spec, grid, res, err, cutoff = evolve_packet({k: p[k] for k in keys}, keep_snapshots=True)
    out = _need_out(p)
    export(res, p["format"], out)
    pred0 = gaussian_moments_predicted(spec, p["B"], 0.0)
    predT = gaussian_moments_predicted(spec, p["B"], p["T"])
    print(json.dumps(dict(
        out=str(out),
        max_relative_error=err,
        velocity=float(np.polyfit(res.times, res.center[:, 0], 1)[0]),
        velocity_predicted=predT.v0,
        log_norm_growth=float(res.log_norm[-1] - res.log_norm[0]),
        log_norm_growth_closed_form=predT.log_amp - pred0.log_amp,
    )))


def _cmd_scenario(args):
    cfg = _load_config(args.pop("config")) if "config" in args else {}
    # a manifest carries its parameters under "params"
    overrides = dict(cfg.pop("params", {}))
    name = args.pop("name", None) or cfg.pop("scenario", None)
    cfg.pop("scenario", None)
    cfg.pop("files", None)
    cfg.pop("package_version", None)
    if name is None:
        raise UsageError("scenario name required")
    scale = args.pop("scale", cfg.pop("scale", "desk"))
    seed = args.pop("seed", None)
    seed = _coerce("seed", cfg.pop("seed"), 0) if seed is None and "seed" in cfg else seed
    seed = default_seed() if seed is None else seed
    out = args.pop("out", None) or (Path(cfg.pop("out")) if "out" in cfg else None)
    cfg.pop("out", None)
    if out is None:
        raise UsageError("--out is required")
    overrides.update(cfg)
    for item in args.pop("overrides", []):
        if "=" not in item:
            raise UsageError(f"--set expects KEY=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        overrides[k.strip()] = v.strip()
    overrides.update(args)
    m = run_scenario(ScenarioSpec(name, Path(out), seed, scale, overrides))
    print(f"wrote {len(m['files'])} files to {out} (scenario {name}, scale {scale}, seed {seed})")


_COMMANDS = {
    "build": _cmd_build,
    "spectrum": _cmd_spectrum,
    "ansatz": _cmd_ansatz,
    "drive": _cmd_drive,
    "evolve": _cmd_evolve,
}


def main(argv=None) -> int:
    """Run the CLI; returns the process exit code."""
    try:
        ns = vars(_parser().parse_args(argv))
        command = ns.pop("command")
        if command == "scenario":
            _cmd_scenario(ns)
        else:
            _COMMANDS[command](_resolve(command, ns))
        return 0
    except (UsageError, InvalidSpecError) as e:
        # malformed parameters given on the command line are usage errors
        print(f"usage error: {e}", file=sys.stderr)
        return 2
    except (ClmError, OSError) as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
