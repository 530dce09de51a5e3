"""Scenario presets and the runner.

Each preset has a ``full`` parameter set and a ``desk`` set that shrinks
the lattice while rescaling ``B`` so the energy band ``B L / 2`` (or
``B N / 2``) is unchanged.  A run writes ``manifest.json`` plus CSV, JSON
and SVG artifacts into one directory; the manifest alone is enough to
reproduce the bundle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .analytics import (
    ContinuumParams,
    Lattice2dParams,
    ansatz_pointwise_error,
    bounds_for,
    continuum_residual,
    dirac_zero_mode_residual,
    fit_lattice_clm_2d,
    generalized_mode_residual,
    max_ansatz_pr_2d,
    sample_lattice_clm,
)
from .dynamics import (
    ContinuumOperator,
    WavepacketSpec,
    closed_form_evolution,
    gaussian_moments_predicted,
    integrate_rk4,
    packet_y_cutoff,
    wavepacket_grid,
)
from .errors import UsageError
from .export import SPECTRUM_COLUMNS, EVOLUTION_COLUMNS, SWEEP_COLUMNS, spectrum_svg, svg_heatmap, svg_scatter, sweep_svg, write_csv, write_json
from .lattice import HamiltonianMatrix, MassProfile, build_1d_gainloss, build_1d_nonreciprocal, build_2d_clm
from .response import frequency_sweep, sweep_metrics
from .spectral import eig, interior_filter, linear_trend, spectrum_table

__all__ = [
    "PRESETS",
    "SCENARIOS",
    "ScenarioSpec",
    "resolve_params",
    "run_scenario",
    "build_model",
    "compare_states",
    "center_law_deviation",
    "evolve_packet",
    "continuum_checks",
]

_2D_FULL = dict(Lx=60, Ly=60, tx=1.0, ty=1.0, backend="native")
_2D_DESK = dict(Lx=30, Ly=30, tx=1.0, ty=1.0, backend="native")
_RAINBOW = dict(model="nonreciprocal", mass="linear", t=1.0, gamma=1.9, kappa=0.2, omega_steps=21)
_FUNNEL = dict(model="gainloss", mass="linear", t=1.0, gamma=9.9, kappa=0.2, omega_min=-1.6, omega_max=1.6, omega_steps=21)
_S1 = dict(B=-0.005, y0=0.0, qx=0.0, T=40.0, dt=0.05, nx=200, ny=200, h=1.0, record_every=20)

PRESETS: dict = {
    "fig2b": {
        "full": dict(_2D_FULL, B=0.03),
        "desk": dict(_2D_DESK, B=0.06),
    },
    "fig2c": {
        "full": dict(_2D_FULL, B=0.3),
        "desk": dict(_2D_DESK, B=0.6),
    },
    "fig2d": {
        "full": dict(_2D_FULL, B=0.3, interior_widths=3.0),
        "desk": dict(_2D_DESK, B=0.6, interior_widths=3.0),
    },
    "fig2ef": {
        "full": dict(_2D_FULL, B=0.3, n_states=5, interior_widths=3.0, radius=2.0),
        "desk": dict(_2D_DESK, B=0.6, n_states=5, interior_widths=3.0, radius=2.0),
    },
    "fig3bc": {
        "full": dict(_RAINBOW, N=2000, B=0.01, omega_min=-8.0, omega_max=8.0),
        "desk": dict(_RAINBOW, N=400, B=0.05, omega_min=-8.0, omega_max=8.0),
    },
    "fig3ef": {
        "full": dict(_FUNNEL, N=2000, B=0.01),
        "desk": dict(_FUNNEL, N=400, B=0.05),
    },
    "figS2c": {
        "full": dict(_RAINBOW, mass="random", N=2000, B=0.01, omega_min=-8.0, omega_max=8.0),
        "desk": dict(_RAINBOW, mass="random", N=400, B=0.05, omega_min=-8.0, omega_max=8.0),
    },
    "figS2f": {
        "full": dict(_FUNNEL, mass="random", N=2000, B=0.01),
        "desk": dict(_FUNNEL, mass="random", N=400, B=0.05),
    },
    "figS1a": {
        "full": dict(_S1, alpha=-0.005, beta=-0.0037, x0=-50.0, qy=-0.025),
    },
    "figS1b": {
        "full": dict(_S1, alpha=-0.0017, beta=-0.0013, x0=50.0, qy=-0.26),
    },
    "continuum-checks": {
        "full": dict(B=0.5, sx=1, sy=-1, qy=0.5, h=0.1, h_power=0.05),
    },
}
# presets without a separate desk profile are already desk sized
for _p in PRESETS.values():
    _p.setdefault("desk", _p["full"])

SCENARIOS = tuple(PRESETS)


@dataclass
class ScenarioSpec:
    """A scenario run request.

    ``overrides`` replaces preset values; unknown keys or values of the
    wrong type raise :class:`UsageError`.
    """

    name: str
    out_dir: Path
    seed: int = 1
    scale: str = "desk"
    overrides: dict = field(default_factory=dict)


def _coerce(key, value, default):
    if isinstance(default, bool) or isinstance(value, bool):
        raise UsageError(f"{key}: unsupported boolean value")
    if isinstance(default, int):
        if isinstance(value, float) and value.is_integer():
            value = int(value)
        if isinstance(value, str):
            try:
                value = int(value)
            except ValueError:
                raise UsageError(f"{key}: expected an integer, got {value!r}") from None
        if not isinstance(value, int):
            raise UsageError(f"{key}: expected an integer, got {value!r}")
        return value
    if isinstance(default, float):
        if isinstance(value, str):
            try:
                value = float(value)
            except ValueError:
                raise UsageError(f"{key}: expected a number, got {value!r}") from None
        if not isinstance(value, (int, float)) or not math.isfinite(value):
            raise UsageError(f"{key}: expected a finite number, got {value!r}")
        return float(value)
    if not isinstance(value, str):
        raise UsageError(f"{key}: expected a string, got {value!r}")
    return value


def resolve_params(name: str, scale: str = "desk", overrides: dict | None = None) -> dict:
    """Preset values for ``name`` at ``scale`` with type-checked overrides."""
    if name not in PRESETS:
        raise UsageError(f"unknown scenario {name!r}; choose from {', '.join(SCENARIOS)}")
    if scale not in ("desk", "full"):
        raise UsageError(f"unknown scale {scale!r}")
    params = dict(PRESETS[name][scale])
    for k, v in (overrides or {}).items():
        if k not in params:
            raise UsageError(f"unknown parameter {k!r} for scenario {name}")
        params[k] = _coerce(k, v, params[k])
    return params


# ----------------------------------------------------------------- helpers


def build_model(p: dict, seed: int) -> HamiltonianMatrix:
    """Build the Hamiltonian described by a resolved parameter map."""
    if "Lx" in p:
        return build_2d_clm(p["Lx"], p["Ly"], p["tx"], p["ty"], p["B"])
    random = p["mass"] == "random"
    if p["mass"] not in ("linear", "random"):
        raise UsageError(f"unknown mass kind {p['mass']!r}")
    if p["model"] == "nonreciprocal":
        m = MassProfile(p["mass"], p["B"], seed if random else None, "real")
        return build_1d_nonreciprocal(p["N"], p["t"], m)
    if p["model"] == "gainloss":
        m = MassProfile(p["mass"], p["B"], seed if random else None, "imaginary")
        return build_1d_gainloss(p["N"], p["t"], m)
    raise UsageError(f"unknown model {p['model']!r}")


def compare_states(H: HamiltonianMatrix, table, decomp, n_states: int, seed: int, interior_widths: float = 3.0, radius: float = 2.0) -> list:
    """Fit the lattice ansatz to randomly chosen interior eigenstates.

    Returns one dict per state with its index, energy, center, pointwise
    ansatz error, eigenpair residual and the fitted descriptor.
    """
    keep = interior_filter(H.indexer, interior_widths)
    pool = [i for i, s in enumerate(table) if keep(s)]
    if len(pool) < n_states:
        raise UsageError(f"only {len(pool)} interior states, asked for {n_states}")
    picks = np.sort(np.random.default_rng(seed).choice(pool, size=n_states, replace=False))
    params = Lattice2dParams.from_hamiltonian(H)
    out = []
    for i in picks:
        s = table[i]
        desc = fit_lattice_clm_2d(params, s.E, (s.mean_x, s.mean_y))
        err = ansatz_pointwise_error(decomp.vectors[:, i], desc, H.indexer, radius)
        out.append(dict(index=int(i), E=s.E, center=(s.mean_x, s.mean_y), error=err, residual=s.residual, desc=desc))
    return out


def center_law_deviation(H: HamiltonianMatrix, table, band_fraction: float = 0.8) -> float:
    """Max ``|<x> - Re E / B|`` over nonreciprocal-chain states inside the band."""
    B, N = H.params["B"], H.params["N"]
    lim = band_fraction * abs(B) * N / 2
    d = [abs(s.mean_x - s.re_E / B) for s in table if abs(s.re_E) <= lim]
    return float(max(d)) if d else float("nan")


def evolve_packet(p: dict, keep_snapshots: bool = False):
    """Run the finite-difference packet evolution described by ``p``.

    Returns ``(spec, grid, result, max_error, cutoff)`` where ``max_error``
    is the largest relative L2 deviation from the closed form over the
    recorded times (only computed when snapshots are kept).
    """
    spec = WavepacketSpec(p["alpha"], p["beta"], p["x0"], p["y0"], p["qx"], p["qy"])
    B, T = p["B"], p["T"]
    grid = wavepacket_grid(spec, B, T, p["nx"], p["ny"], p["h"])
    cutoff = packet_y_cutoff(spec, B, T)
    op = ContinuumOperator(B, grid, y_cutoff=cutoff)
    psi0 = closed_form_evolution(B, spec, 0.0, grid)
    res = integrate_rk4(op, psi0, p["dt"], T, p["record_every"], coords=grid, project=op.project, keep_snapshots=keep_snapshots)
    err = float("nan")
    if keep_snapshots:
        errs = []
        for snap, t in zip(res.snapshots, res.times):
            ref = closed_form_evolution(B, spec, t, grid)
            errs.append(np.linalg.norm(snap - ref) / np.linalg.norm(ref))
        err = float(max(errs))
    return spec, grid, res, err, cutoff


def continuum_checks(p: dict) -> list:
    """Finite-difference residuals at two spacings for every analytic mode.

    2D modes use ``h`` and ``h / 2``; the 1D ``B y^n`` modes use ``h_power``
    and ``h_power / 2``.

    Returns rows ``(check, h, residual)``.
    """
    B, h, hp = p["B"], p["h"], p["h_power"]
    q = (0.0, p["qy"])
    cp = ContinuumParams(p["sx"], p["sy"], B)
    checks = {
        "continuum_clm": (h, lambda hh: continuum_residual(cp, 0.0, q, h=hh)),
        "dirac_zero_mode": (h, lambda hh: dirac_zero_mode_residual(1.0 + 0.5j, B, q, h=hh)),
        "power_mode_n1": (hp, lambda hh: generalized_mode_residual(1, B, h=hh)),
        "power_mode_n3": (hp, lambda hh: generalized_mode_residual(3, B, h=hh)),
        "power_mode_n5": (hp, lambda hh: generalized_mode_residual(5, B, h=hh)),
    }
    rows = []
    for name, (h0, fn) in checks.items():
        for hh in (h0, h0 / 2):
            rows.append((name, hh, fn(hh)))
    return rows


# ---------------------------------------------------------------- runners


def _spectrum_rows(table):
    return ((i, s.re_E, s.im_E, s.pr, s.mean_x, s.mean_y, s.residual) for i, s in enumerate(table))


def _run_2d(name, p, seed, out):
    H = build_model(p, seed)
    dec = eig(H, backend=p["backend"])
    table = spectrum_table(H, dec)
    files = [write_csv(out / "spectrum.csv", SPECTRUM_COLUMNS, _spectrum_rows(table))]
    bnd = bounds_for(H)
    E = dec.values
    pr = np.array([s.pr for s in table])
    imax = int(np.argmax(pr))
    metrics = dict(
        n_states=len(table),
        bounds=dict(re_max=bnd.re_max, im_max=bnd.im_max),
        fraction_in_bounds=float(np.mean(bnd.contains(E))),
        fraction_in_padded_bounds=float(np.mean(bnd.contains(E, pad=0.5))),
        max_residual_rel=float(dec.residuals.max() / H.frobenius_norm()),
        pr_max=float(pr[imax]),
        pr_max_energy=complex(E[imax]),
        pr_max_center=[table[imax].mean_x, table[imax].mean_y],
    )
    ansatz_pr, mu, nu = max_ansatz_pr_2d(Lattice2dParams.from_hamiltonian(H))
    metrics["ansatz_pr_max"] = dict(pr=ansatz_pr, mu=mu, nu=nu)
    files.append(spectrum_svg(table, out / "spectrum.svg", bnd, title=f"{name}: spectrum, B={p['B']}"))
    if name == "fig2d":
        keep = interior_filter(H.indexer, p["interior_widths"])
        s_re = linear_trend(table, "mean_y", "re_E", keep)
        s_im = linear_trend(table, "mean_x", "im_E", keep)
        metrics["trend_re_vs_y"] = dict(slope=s_re[0], intercept=s_re[1], r2=s_re[2], expected=p["B"])
        metrics["trend_im_vs_x"] = dict(slope=s_im[0], intercept=s_im[1], r2=s_im[2], expected=-p["B"])
        sel = [s for s in table if keep(s)]
        files.append(svg_scatter([s.mean_y for s in sel], [s.re_E for s in sel], out / "re_vs_y.svg", title="Re E against <y>", xlabel="<y>", ylabel="Re E", lines=[(s_re[0], s_re[1], False), (p["B"], 0.0, True)]))
        files.append(svg_scatter([s.mean_x for s in sel], [s.im_E for s in sel], out / "im_vs_x.svg", title="Im E against <x>", xlabel="<x>", ylabel="Im E", lines=[(s_im[0], s_im[1], False), (-p["B"], 0.0, True)]))
    if name == "fig2ef":
        cmp = compare_states(H, table, dec, p["n_states"], seed, p["interior_widths"], p["radius"])
        x, y = H.indexer.positions()
        rows = []
        for c in cmp:
            num = np.abs(dec.vectors[:, c["index"]])
            ans = np.abs(sample_lattice_clm(c["desc"], H.indexer).psi)
            for j in range(H.n):
                rows.append((c["index"], j, x[j], y[j], num[j], ans[j]))
        files.append(write_csv(out / "profiles.csv", ("state", "site", "x", "y", "numeric", "ansatz"), rows))
        metrics["states"] = [dict(index=c["index"], E=c["E"], center=list(c["center"]), ansatz_error=c["error"], residual=c["residual"], tau=[c["desc"].tau_x, c["desc"].tau_y]) for c in cmp]
        metrics["max_ansatz_error"] = max(c["error"] for c in cmp)
    return metrics, files


def _run_chain(name, p, seed, out):
    H = build_model(p, seed)
    dec = eig(H)
    table = spectrum_table(H, dec)
    bnd = bounds_for(H)
    files = [write_csv(out / "spectrum.csv", SPECTRUM_COLUMNS, _spectrum_rows(table))]
    files.append(spectrum_svg(table, out / "spectrum.svg", bnd, title=f"{name}: spectrum"))
    omegas = np.linspace(p["omega_min"], p["omega_max"], p["omega_steps"])
    sw = frequency_sweep(H, omegas, p["kappa"], p["gamma"], seed)
    m = sweep_metrics(sw)
    rows = ((float(w), j + 1, float(sw.profiles[i, j])) for i, w in enumerate(sw.omegas) for j in range(sw.n_sites))
    files.append(write_csv(out / "sweep.csv", SWEEP_COLUMNS, rows))
    trend = (m["rainbow_slope"], m["rainbow_intercept"]) if p["model"] == "nonreciprocal" and p["mass"] == "linear" else None
    files.append(sweep_svg(sw, out / "sweep.svg", title=f"{name}: steady-state amplitude", trend=trend))
    metrics = dict(
        slope=m["rainbow_slope"],
        r2=m["rainbow_r2"],
        funnel_fraction=m["funnel_fraction"],
        correlation=m["peak_omega_correlation"],
        funnel_window=m["funnel_window"],
        peaks=sw.peaks,
        max_solve_residual=float(sw.residuals.max()),
        fraction_in_bounds=float(np.mean(bnd.contains(dec.values, pad=0.3))),
    )
    metrics.update({k: v for k, v in m.items() if k.startswith("rainbow")})
    if p["model"] == "nonreciprocal" and p["mass"] == "linear":
        metrics["expected_slope"] = 1.0 / p["B"]
        metrics["center_law_max_deviation"] = center_law_deviation(H, table)
    return metrics, files


def _run_s1(name, p, seed, out):
    spec, grid, res, err, cutoff = evolve_packet(p, keep_snapshots=True)
    T = p["T"]
    pred0 = gaussian_moments_predicted(spec, p["B"], 0.0)
    predT = gaussian_moments_predicted(spec, p["B"], T)
    velocity = float(np.polyfit(res.times, res.center[:, 0], 1)[0])
    rows = ((t, *res.center[i], *res.width[i], res.log_norm[i]) for i, t in enumerate(res.times))
    files = [write_csv(out / "evolution.csv", EVOLUTION_COLUMNS, rows)]
    iy = int(np.argmin(np.abs(grid.y - spec.y0)))
    cut = np.array([np.abs(s[iy]) for s in res.snapshots])
    files.append(svg_heatmap(cut, grid.x, res.times, out / "packet.svg", title=f"{name}: |psi(x, y0, t)|", xlabel="x", ylabel="t", color_label="|psi|/max"))
    metrics = dict(
        max_relative_error=err,
        y_cutoff=cutoff,
        velocity=velocity,
        velocity_predicted=predT.v0,
        width_initial=list(res.width[0]),
        width_final=list(res.width[-1]),
        width_predicted=[predT.width_x, predT.width_y],
        log_norm_growth=float(res.log_norm[-1] - res.log_norm[0]),
        log_norm_growth_closed_form=predT.log_amp - pred0.log_amp,
        log_norm_growth_alt_form=predT.log_amp_alt - pred0.log_amp_alt,
    )
    return metrics, files


def _run_continuum(name, p, seed, out):
    rows = continuum_checks(p)
    files = [write_csv(out / "residuals.csv", ("check", "h", "residual"), rows)]
    ratios = {}
    for i in range(0, len(rows), 2):
        ratios[rows[i][0]] = rows[i][2] / rows[i + 1][2]
    return dict(halving_ratio=ratios), files


_RUNNERS = {
    "fig2b": _run_2d,
    "fig2c": _run_2d,
    "fig2d": _run_2d,
    "fig2ef": _run_2d,
    "fig3bc": _run_chain,
    "fig3ef": _run_chain,
    "figS2c": _run_chain,
    "figS2f": _run_chain,
    "figS1a": _run_s1,
    "figS1b": _run_s1,
    "continuum-checks": _run_continuum,
}


def run_scenario(spec: ScenarioSpec) -> dict:
    """Regenerate one scenario's data into ``spec.out_dir``.

    Returns
    -------
    dict
        The manifest, also written to ``manifest.json``; ``metrics`` holds
        the scenario's summary numbers (also in ``metrics.json``).

    Raises
    ------
    UsageError
        Unknown scenario, scale or parameter.
    ClmError
        Any engine failure.
    """
    if not 0 <= int(spec.seed) < 2**64:
        raise UsageError("seed must be an unsigned 64-bit integer")
    p = resolve_params(spec.name, spec.scale, spec.overrides)
    out = Path(spec.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    metrics, files = _RUNNERS[spec.name](spec.name, p, int(spec.seed), out)
    metrics = dict(metrics, seed=int(spec.seed), params=p)
    files.append(write_json(metrics, out / "metrics.json"))
    manifest = dict(
        scenario=spec.name,
        scale=spec.scale,
        seed=int(spec.seed),
        params=p,
        files=sorted(f.name for f in files) + ["manifest.json"],
        package_version=__version__,
    )
    write_json(manifest, out / "manifest.json")
    return dict(manifest, metrics=metrics)
