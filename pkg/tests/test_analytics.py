import itertools
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clmkit import CoverageError, DegenerateDriftError, InvalidSpecError, NoFieldError
from clmkit.analytics import (
    ChainParams,
    ContinuumParams,
    EnvelopeWarning,
    Lattice2dParams,
    best_k_1d,
    best_k_2d,
    continuum_clm,
    continuum_residual,
    descriptor_record,
    dirac_zero_mode_residual,
    energy_bounds,
    fit_lattice_clm_1d,
    format_record,
    gaussian_pr_1d,
    gaussian_pr_2d,
    generalized_mode_residual,
    lattice_clm_1d,
    lattice_clm_2d,
    rayleigh_residual,
    sample_continuum_clm,
    sample_lattice_clm,
)
from clmkit.grid import Grid2D
from clmkit.lattice import MassProfile, SiteIndexer, build_1d_gainloss, build_1d_nonreciprocal, build_2d_clm
from clmkit.spectral import eig, participation_ratio, spectrum_table

# --------------------------------------------------------------- continuum


def test_continuum_descriptor_example():
    c = continuum_clm(ContinuumParams(1, -1, 1.0), 1.0)
    assert c.tau == 0.5 and c.normalizable
    assert c.r0 == pytest.approx((0.0, -1.0))


def test_continuum_non_normalizable_sign():
    c = continuum_clm(ContinuumParams(1, 1, 1.0), 1j)
    assert c.tau == -0.5 and not c.normalizable
    with pytest.raises(InvalidSpecError):
        sample_continuum_clm(c, Grid2D.centered(0, 0, 11, 11, 0.5))


def test_continuum_needs_field():
    with pytest.raises(NoFieldError):
        continuum_clm(ContinuumParams(1, -1, 0.0), 0.0)


@pytest.mark.parametrize("sx,sy,B", list(itertools.product((1, -1), (1, -1), (0.7, -0.7))))
def test_tau_sign_law(sx, sy, B):
    c = continuum_clm(ContinuumParams(sx, sy, B), 0.3 - 0.2j)
    assert c.tau == pytest.approx(-sx * sy * B / 2)
    assert c.normalizable == (-sx * sy * B > 0)


@given(st.sampled_from((1, -1)), st.sampled_from((1, -1)), st.floats(0.1, 2), st.floats(-3, 3), st.floats(-3, 3))
def test_center_is_zero_at_free_energy(sx, sy, B, qx, qy):
    p = ContinuumParams(sx, sy, B)
    c = continuum_clm(p, p.e0((qx, qy)), (qx, qy))
    assert c.r0 == pytest.approx((0, 0), abs=1e-12)


def test_center_is_affine_in_energy():
    p = ContinuumParams(1, -1, 0.4)
    r = lambda E: np.array(continuum_clm(p, E).r0)
    np.testing.assert_allclose(r(1e-3) - r(0), [0, -1e-3 / 0.4], atol=1e-12)
    np.testing.assert_allclose(r(1e-3j) - r(0), [1e-3 / (-1 * 0.4), 0], atol=1e-12)


def test_continuum_sampling_shape_and_norm():
    c = continuum_clm(ContinuumParams(1, -1, 1.0), ContinuumParams(1, -1, 1.0).e0((0, 0)))
    g = Grid2D.centered(0, 0, 201, 201, 0.1)
    psi = sample_continuum_clm(c, g)
    assert np.sum(np.abs(psi) ** 2) * g.h**2 == pytest.approx(1, abs=1e-12)
    i0, i2 = 100, 120
    assert psi[100, i0] / psi[100, i2] == pytest.approx(np.exp(2.0))
    cq = continuum_clm(ContinuumParams(1, -1, 1.0), ContinuumParams(1, -1, 1.0).e0((0.3, 0)), (0.3, 0))
    pq = sample_continuum_clm(cq, g)
    np.testing.assert_allclose(np.abs(pq), np.abs(psi), atol=1e-14)
    np.testing.assert_allclose(np.angle(pq[100, 101] / pq[100, 100]), 0.3 * 0.1, atol=1e-12)


def test_continuum_sampling_needs_coverage():
    c = continuum_clm(ContinuumParams(1, -1, 1.0), 0.0)
    with pytest.raises(CoverageError):
        sample_continuum_clm(c, Grid2D.centered(0, 0, 21, 21, 0.1))


def test_continuum_residual_second_order():
    p = ContinuumParams(1, -1, 0.5)
    r1 = continuum_residual(p, 0.0, h=0.1)
    r2 = continuum_residual(p, 0.0, h=0.05)
    assert r1 <= 0.01
    assert 3.5 <= r1 / r2 <= 4.5
    assert continuum_residual(p, 1.0, h=0.1) == pytest.approx(r1, rel=0.1)


# ------------------------------------------------------------------ lattice


def test_lattice_2d_descriptor():
    p = Lattice2dParams(1.0, 1.0, 0.3)
    c = lattice_clm_2d(p, (-np.pi / 2, 0.0))
    assert (c.mu, c.nu) == pytest.approx((-2, 2))
    assert (c.tau_x, c.tau_y) == pytest.approx((0.075, 0.075))
    assert c.exists
    bad = lattice_clm_2d(p, (np.pi / 2, 0.0))
    assert bad.tau_x == pytest.approx(-0.075) and not bad.exists
    free = lattice_clm_2d(p, (-np.pi / 2, 0.0), (0.05, 0.0), p.e0((-np.pi / 2 + 0.05, 0.0)))
    assert free.r0 == pytest.approx((0, 0), abs=1e-12)
    assert best_k_2d(p) == pytest.approx((-np.pi / 2, 0.0))


def test_lattice_2d_degenerate_drift():
    with pytest.raises(DegenerateDriftError):
        lattice_clm_2d(Lattice2dParams(1, 1, 0.3), (0.0, 0.0))
    with pytest.raises(NoFieldError):
        lattice_clm_2d(Lattice2dParams(1, 1, 0.0), (-np.pi / 2, 0.0))


def test_envelope_guard_warns():
    p = Lattice2dParams(1.0, 1.0, 0.3)
    with pytest.warns(EnvelopeWarning):
        lattice_clm_2d(p, (-np.pi / 2, 0.0), (0.5, 0.0))
    with pytest.warns(EnvelopeWarning):
        lattice_clm_2d(Lattice2dParams(1.0, 1.0, 3.0), (-np.pi / 2, 0.0))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        lattice_clm_2d(p, (-np.pi / 2, 0.0), (0.1, 0.0))


def test_chain_centers():
    nr = lattice_clm_1d(ChainParams(1.0, 0.01), "nonreciprocal", np.pi, 0.0, 1.0)
    assert nr.x0 == pytest.approx(100) and nr.exists
    gl = lattice_clm_1d(ChainParams(1.0, 0.01), "gainloss", np.pi / 2, 0.0, 0.5j)
    assert gl.x0 == pytest.approx(50) and gl.exists
    k = 2.5
    free = lattice_clm_1d(ChainParams(1.0, 0.01), "nonreciprocal", k, 0.0, -2j * np.sin(k))
    assert free.x0 == pytest.approx(0, abs=1e-12)


def test_chain_drift_and_existence():
    c = lattice_clm_1d(ChainParams(1.0, 0.05), "nonreciprocal", np.pi)
    assert c.c == pytest.approx(2) and c.tau == pytest.approx(0.0125)
    assert not lattice_clm_1d(ChainParams(1.0, 0.05), "nonreciprocal", 0.0).exists
    assert lattice_clm_1d(ChainParams(1.0, 0.05), "gainloss", np.pi / 2).exists
    assert not lattice_clm_1d(ChainParams(1.0, 0.05), "gainloss", -np.pi / 2).exists
    with pytest.raises(DegenerateDriftError):
        lattice_clm_1d(ChainParams(1.0, 0.05), "gainloss", 0.0)
    with pytest.raises(InvalidSpecError):
        lattice_clm_1d(ChainParams(1.0, 0.05), "other", 1.0)


def test_existing_half_of_the_zone_has_small_residual():
    # residual minimisation decides which sign of the drift hosts CLMs
    N, B = 400, 0.05
    H = build_1d_gainloss(N, 1.0, MassProfile("linear", B, component="imaginary"))
    ix = SiteIndexer((N,))
    res = {}
    for k in (np.pi / 2, -np.pi / 2):
        c = lattice_clm_1d(ChainParams(1.0, B), "gainloss", k)
        c = type(c)(c.model, c.k, c.q, c.E, c.c, abs(c.tau), c.x0, True, c.B, c.x0_imag)
        res[k] = rayleigh_residual(H, sample_lattice_clm(c, ix).psi)[1]
    assert res[np.pi / 2] < 0.05 < res[-np.pi / 2]


def test_sampled_gaussian_pr():
    c2 = lattice_clm_2d(Lattice2dParams(1.0, 1.0, 0.3), (-np.pi / 2, 0.0))
    s = sample_lattice_clm(c2, SiteIndexer((60, 60)))
    assert s.warning is None
    assert participation_ratio(s.psi) == pytest.approx(gaussian_pr_2d(0.075, 0.075), rel=0.05)
    assert gaussian_pr_2d(0.075, 0.075) == pytest.approx(41.9, abs=0.05)
    c1 = lattice_clm_1d(ChainParams(1.0, 0.01), "nonreciprocal", np.pi)
    assert c1.tau == pytest.approx(0.0025)
    s1 = sample_lattice_clm(c1, SiteIndexer((2000,)))
    assert participation_ratio(s1.psi) == pytest.approx(gaussian_pr_1d(0.0025), rel=0.05)


def test_sampling_modulus_ignores_q_and_flags_clipping():
    p = Lattice2dParams(1.0, 1.0, 0.3)
    ix = SiteIndexer((30, 30))
    a = lattice_clm_2d(p, (-np.pi / 2, 0.0))
    b = lattice_clm_2d(p, (-np.pi / 2, 0.0), (0.05, 0.0), p.e0((-np.pi / 2 + 0.05, 0.0)))
    np.testing.assert_allclose(np.abs(sample_lattice_clm(a, ix).psi), np.abs(sample_lattice_clm(b, ix).psi), atol=1e-14)
    edge = lattice_clm_2d(p, (-np.pi / 2, 0.0), (0.0, 0.0), 3.0)
    assert sample_lattice_clm(edge, ix).warning is not None
    with pytest.raises(InvalidSpecError):
        sample_lattice_clm(lattice_clm_2d(p, (np.pi / 2, 0.0)), ix)


def test_rayleigh_examples():
    assert rayleigh_residual(np.diag([1, 2]), np.array([1, 0])) == (1, 0)
    with pytest.raises(InvalidSpecError):
        rayleigh_residual(np.eye(2), np.zeros(2))
    p = Lattice2dParams(1.0, 1.0, 0.3)
    c = lattice_clm_2d(p, (-np.pi / 2, 0.0), (0.0, 0.0), p.e0((-np.pi / 2, 0.0)))
    H = build_2d_clm(60, 60, 1.0, 1.0, 0.3)
    E, r = rayleigh_residual(H, sample_lattice_clm(c, H.indexer).psi)
    assert r <= 0.35 and abs(E - c.E) <= 0.3
    Hc = build_1d_nonreciprocal(400, 1.0, MassProfile("linear", 0.05))
    cc = lattice_clm_1d(ChainParams(1.0, 0.05), "nonreciprocal", best_k_1d(ChainParams(1.0, 0.05), "nonreciprocal"))
    assert rayleigh_residual(Hc, sample_lattice_clm(cc, Hc.indexer).psi)[1] <= 0.15


def test_energy_bounds_examples():
    b = energy_bounds("2d", 0.3, Lx=60, Ly=60)
    assert (b.re_max, b.im_max) == (11, 11)
    b = energy_bounds("nonreciprocal", 0.01, N=2000)
    assert (b.re_max, b.im_max) == pytest.approx((10, 2))
    b = energy_bounds("2d", 0.0, Lx=10, Ly=10)
    assert (b.re_max, b.im_max) == (2, 2)
    assert energy_bounds("gainloss", 0.05, N=400).im_max == pytest.approx(10)
    with pytest.raises(InvalidSpecError):
        energy_bounds("3d", 0.1)


def test_fit_recovers_chain_state():
    B = 0.05
    H = build_1d_nonreciprocal(400, 1.0, MassProfile("linear", B))
    table = spectrum_table(H, eig(H))
    s = min(table, key=lambda s: abs(s.E - 3.0))
    d = fit_lattice_clm_1d(ChainParams(1.0, B), "nonreciprocal", s.E, s.mean_x)
    assert d.exists and d.x0 == pytest.approx(s.mean_x, abs=1e-6)


# ---------------------------------------------------- generalized modes


def test_power_modes_converge_at_second_order():
    for n in (1, 3, 5):
        r1 = generalized_mode_residual(n, 0.5, h=0.05)
        r2 = generalized_mode_residual(n, 0.5, h=0.025)
        assert 3.5 <= r1 / r2 <= 4.5
    assert generalized_mode_residual(1, 0.5, h=0.05) <= 5e-3
    assert generalized_mode_residual(3, 0.5, h=0.05) <= 5e-3


def test_linear_power_mode_matches_2d_reduction():
    r1d = generalized_mode_residual(1, 0.5, h=0.1)
    r2d = continuum_residual(ContinuumParams(1, -1, 0.5), 0.0, h=0.1)
    assert r1d * np.sqrt(2) == pytest.approx(r2d, rel=0.02)


@pytest.mark.parametrize("n", [0, 2, 4, -1])
def test_even_powers_rejected(n):
    with pytest.raises(InvalidSpecError):
        generalized_mode_residual(n, 0.5)


def test_dirac_zero_mode_map():
    r0 = dirac_zero_mode_residual(0.0, 0.5)
    assert r0 <= 0.01
    assert dirac_zero_mode_residual(1 + 0.5j, 0.5) == pytest.approx(r0, rel=0.1)
    assert dirac_zero_mode_residual(1 + 0.5j, -0.5) == pytest.approx(r0, rel=0.1)
    assert 3.5 <= r0 / dirac_zero_mode_residual(0.0, 0.5, h=0.05) <= 4.5
    with pytest.raises(InvalidSpecError):
        dirac_zero_mode_residual(0.0, 0.5, sublattice="A")


@settings(max_examples=20)
@given(st.floats(-2, 2), st.floats(-2, 2))
def test_record_format_is_key_value(re, im):
    c = lattice_clm_2d(Lattice2dParams(1.0, 1.0, 0.3), (-np.pi / 2, 0.0), (0.0, 0.0), complex(re, im))
    rec = descriptor_record(c)
    for k in ("model", "k", "q", "E", "tau", "r0", "exists"):
        assert k in rec
    lines = format_record(rec).splitlines()
    assert all("=" in ln for ln in lines) and len(lines) == len(rec)
