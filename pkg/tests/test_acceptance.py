"""Acceptance criteria, each run at its stated tolerance.

Every test prints one PASS/FAIL line (collected again in the terminal
summary).  Criteria that cannot be met at the stated tolerance still run
their full check and are marked ``xfail(strict=True)``; the analysis lives
in the project's decisions ledger.
"""

import time

import numpy as np
import pytest

from clmkit.analytics import bounds_for
from clmkit.dynamics import gaussian_moments_predicted
from clmkit.lattice import MassProfile, build_1d_gainloss, build_1d_nonreciprocal, build_2d_clm
from clmkit.response import DriveSpec, frequency_sweep, random_phase_drive, spectral_response, steady_state, sweep_metrics
from clmkit.scenarios import build_model, center_law_deviation, compare_states, continuum_checks, evolve_packet, resolve_params
from clmkit.spectral import eig, interior_filter, linear_trend, spectrum_table

UNATTAINABLE = "unattainable at the stated tolerance; see the decisions ledger"


@pytest.fixture(scope="module")
def lattice30():
    t0 = time.perf_counter()
    H = build_2d_clm(30, 30, 1.0, 1.0, 0.6)
    dec = eig(H)
    table = spectrum_table(H, dec)
    return H, dec, table, time.perf_counter() - t0


@pytest.fixture(scope="module")
def chain400():
    H = build_model(resolve_params("fig3bc"), 1)
    dec = eig(H)
    return H, dec, spectrum_table(H, dec)


def _sweep_params(name):
    p = resolve_params(name)
    return p, np.linspace(p["omega_min"], p["omega_max"], p["omega_steps"])


def test_c1_spectrum_bounds(lattice30, report):
    H, dec, _, runtime = lattice30
    b = bounds_for(H)
    assert (b.re_max, b.im_max) == (11.0, 11.0)
    padded = float(np.mean(b.contains(dec.values, pad=0.5)))
    inner = float(np.mean(b.contains(dec.values)))
    ok = padded == 1.0 and inner >= 0.97 and runtime <= 180
    report("criterion 1 (spectrum bounds)", ok, f"padded {padded:.4f}, unpadded {inner:.4f}, eig {runtime:.1f}s")
    assert ok


def test_c2_energy_position_locking(lattice30, report):
    H, _, table, _ = lattice30
    keep = interior_filter(H.indexer, 3.0)
    s_re, _, r2_re = linear_trend(table, "mean_y", "re_E", keep)
    s_im, _, r2_im = linear_trend(table, "mean_x", "im_E", keep)
    ok = abs(s_re - 0.6) <= 0.06 and r2_re >= 0.95 and abs(s_im + 0.6) <= 0.06
    report("criterion 2 (energy-position locking)", ok, f"Re E/<y> slope {s_re:.4f} (R2 {r2_re:.4f}), Im E/<x> slope {s_im:.4f} (R2 {r2_im:.4f})")
    assert ok


def test_c3_eigenstate_ansatz_agreement(lattice30, report):
    H, dec, table, _ = lattice30
    cmp = compare_states(H, table, dec, 5, seed=1, interior_widths=3.0, radius=2.0)
    worst = max(c["error"] for c in cmp)
    res = float(dec.residuals.max() / H.frobenius_norm())
    ok = worst <= 0.10 and res <= 1e-8
    report("criterion 3 (eigenstate-ansatz agreement)", ok, f"max pointwise error {worst:.4f} over 5 states, max residual/||H|| {res:.2e}")
    assert ok


def test_c4_center_law(chain400, report):
    H, dec, table = chain400
    dev = center_law_deviation(H, table, band_fraction=0.8)
    inside = float(np.mean(bounds_for(H).contains(dec.values, pad=0.3)))
    ok = dev <= 3 and inside == 1.0
    report("criterion 4 (1D center law)", ok, f"max |<x> - Re E/B| {dev:.2e} sites, fraction in padded box {inside:.4f}")
    assert ok


def test_c5_rainbow_trapping(chain400, report):
    H = chain400[0]
    p, omegas = _sweep_params("fig3bc")
    assert omegas[-1] == pytest.approx(0.8 * p["B"] * p["N"] / 2)
    t0 = time.perf_counter()
    slopes, r2s = [], []
    for seed in range(1, 11):
        m = sweep_metrics(frequency_sweep(H, omegas, p["kappa"], p["gamma"], seed))
        slopes.append(m["rainbow_slope"])
        r2s.append(m["rainbow_r2"])
    runtime = time.perf_counter() - t0
    slopes = np.array(slopes)
    rsd = float(slopes.std(ddof=1) / slopes.mean())
    ok = abs(slopes[0] * p["B"] - 1) <= 0.05 and r2s[0] >= 0.98 and rsd <= 0.05 and runtime <= 120
    report("criterion 5 (rainbow trapping)", ok, f"slope {slopes[0]:.3f} vs 1/B={1 / p['B']:.1f}, R2 {r2s[0]:.5f}, seed rel. s.d. {rsd:.4f}, {runtime:.1f}s")
    assert ok


def test_c6_funneling(report):
    p, omegas = _sweep_params("fig3ef")
    H = build_model(p, 1)
    m = sweep_metrics(frequency_sweep(H, omegas, p["kappa"], p["gamma"], 1))
    ok = m["funnel_fraction"] >= 0.95
    report("criterion 6 (funneling)", ok, f"funnel fraction {m['funnel_fraction']:.3f}")
    assert ok


def _random_controls(name):
    p, omegas = _sweep_params(name)
    out = []
    for seed in (1, 2, 3):
        m = sweep_metrics(frequency_sweep(build_model(p, seed), omegas, p["kappa"], p["gamma"], seed))
        out.append((seed, m["peak_omega_correlation"], m["funnel_fraction"]))
    return out


def _check_controls(label, name, report):
    rows = _random_controls(name)
    ok = all(abs(rho) <= 0.5 and ff <= 0.3 for _, rho, ff in rows)
    detail = ", ".join(f"seed {s}: rho {rho:+.3f} ff {ff:.3f}" for s, rho, ff in rows)
    report(label, ok, detail)
    assert ok


def test_c7_random_controls_nonreciprocal(report):
    _check_controls("criterion 7 (random controls, nonreciprocal)", "figS2c", report)


@pytest.mark.xfail(strict=True, reason=UNATTAINABLE)
def test_c7_random_controls_gainloss(report):
    _check_controls("criterion 7 (random controls, gain/loss)", "figS2f", report)


def _dynamics(name, report):
    p = resolve_params(name)
    assert (p["nx"], p["ny"], p["h"], p["T"]) == (200, 200, 1.0, 40.0)
    spec, _, res, err, _ = evolve_packet(p, keep_snapshots=True)
    pred0 = gaussian_moments_predicted(spec, p["B"], 0.0)
    predT = gaussian_moments_predicted(spec, p["B"], p["T"])
    drift = float(np.abs(res.width / res.width[0] - 1).max())
    v = float(np.polyfit(res.times, res.center[:, 0], 1)[0])
    growth = float(res.log_norm[-1] - res.log_norm[0])
    expected = predT.log_amp - pred0.log_amp
    ok = err <= 1e-3 and drift <= 0.01 and abs(v / predT.v0 - 1) <= 0.02 and abs(growth / expected - 1) <= 0.02
    report(
        f"criterion 8 (dynamics, {name})",
        ok,
        f"max rel. L2 error {err:.2e}, width drift {drift:.2e}, velocity {v:.5f} vs {predT.v0:.5f}, log-norm growth {growth:.3f} vs {expected:.3f}",
    )
    assert ok


def test_c8_dynamics_a(report):
    _dynamics("figS1a", report)


@pytest.mark.xfail(strict=True, reason=UNATTAINABLE)
def test_c8_dynamics_b(report):
    _dynamics("figS1b", report)


def test_c9_solver_correctness(report):
    worst = dict(trace=0.0, det=0.0, residual=0.0, green=0.0)
    for seed in range(50):
        rng = np.random.default_rng(seed)
        n = 1 + seed % 12
        a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        d = eig(a)
        nrm = np.linalg.norm(a)
        tr, dt = np.trace(a), np.linalg.det(a)
        worst["trace"] = max(worst["trace"], abs(d.values.sum() - tr) / max(abs(tr), nrm))
        worst["det"] = max(worst["det"], abs(np.prod(d.values) - dt) / abs(dt))
        worst["residual"] = max(worst["residual"], d.residuals.max() / nrm)
    # random matrices plus model Hamiltonians whose eigenvectors are well conditioned
    mats = []
    for seed, n in enumerate((10, 20, 40, 60, 60)):
        rng = np.random.default_rng(100 + seed)
        mats.append(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    mats.append(build_1d_gainloss(60, 1.0, MassProfile("random", 0.05, seed=2, component="imaginary")).entries)
    mats.append(build_2d_clm(6, 10, 1.0, 1.0, 0.3).entries)
    for a in mats:
        n = a.shape[0]
        d = random_phase_drive(n, 4)
        for w in (-2.0, 0.0, 1.5):
            lu = steady_state(a, DriveSpec(w, 0.2, 1.9), d).field
            worst["green"] = max(worst["green"], float(np.max(np.abs(lu - spectral_response(a, w, 1.9, 0.2, d)))))
    # linear-mass chains: eigenvectors too ill conditioned for the spectral
    # oracle, so LU is checked against a dense solve and cond(V) is reported
    H = build_1d_nonreciprocal(60, 1.0, MassProfile("linear", 0.05))
    d = random_phase_drive(60, 4)
    lu = steady_state(H, DriveSpec(0.0, 0.2, 1.9), d).field
    dense = np.linalg.solve(1.9j * np.eye(60) - H.entries, 0.2 * d)
    worst["chain_dense"] = float(np.max(np.abs(lu - dense)))
    cond = float(np.linalg.cond(eig(H).vectors))
    ok = worst["trace"] <= 1e-10 and worst["det"] <= 1e-8 and worst["residual"] <= 1e-8 and worst["green"] <= 1e-8 and worst["chain_dense"] <= 1e-12
    detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    report("criterion 9 (solver correctness)", ok, f"{detail} (linear chain cond(V) {cond:.1e})")
    assert ok


def test_c10_continuum_residuals(report):
    rows = continuum_checks(resolve_params("continuum-checks"))
    ratios = {rows[i][0]: rows[i][2] / rows[i + 1][2] for i in range(0, len(rows), 2)}
    ok = all(3.5 <= r <= 4.5 for r in ratios.values())
    report("criterion 10 (continuum residuals)", ok, ", ".join(f"{k} {r:.3f}" for k, r in ratios.items()))
    assert ok
