import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from clmkit import InsufficientDataError, InvalidSpecError
from clmkit.analytics import Lattice2dParams, max_ansatz_pr_2d
from clmkit.lattice import MassProfile, build_1d_gainloss, build_1d_nonreciprocal, build_2d_clm
from clmkit.linalg import det, inverse, lu_factor, lu_solve
from clmkit.spectral import (
    StateStats,
    eig,
    fit_line,
    interior_filter,
    linear_trend,
    participation_ratio,
    spectrum_table,
)


def _rand(n, seed):
    rng = np.random.default_rng(seed)
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


# ------------------------------------------------------------------ LU


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 9), st.integers(0, 2**32 - 1))
def test_lu_solve_matches_reference(n, seed):
    a = _rand(n, seed)
    b = _rand(n, seed + 1)[:, 0]
    x = lu_solve(a, b)
    np.testing.assert_allclose(a @ x, b, atol=1e-10 * np.linalg.norm(a) * np.linalg.norm(x))


def test_lu_det_and_inverse():
    a = _rand(7, 4)
    assert det(a) == pytest.approx(np.linalg.det(a), rel=1e-12)
    np.testing.assert_allclose(inverse(a) @ a, np.eye(7), atol=1e-12)
    f = lu_factor(a)
    assert f.min_pivot > 0


def test_lu_handles_zero_leading_pivot():
    a = np.array([[0, 1], [1, 0]], dtype=complex)
    np.testing.assert_allclose(lu_solve(a, np.array([2, 3])), [3, 2])
    assert det(a) == pytest.approx(-1)


def test_singular_matrix_reports_zero_pivot():
    f = lu_factor(np.array([[1, 2], [2, 4]], dtype=complex))
    assert f.min_pivot == pytest.approx(0, abs=1e-15)


# ------------------------------------------------------------------ eig


def test_eig_diagonal():
    d = eig(np.diag([3, 2 - 1j]))
    np.testing.assert_allclose(d.values, [2 - 1j, 3])
    np.testing.assert_allclose(d.vectors, [[0, 1], [1, 0]], atol=1e-14)


def test_eig_rotation():
    d = eig(np.array([[0, 1], [-1, 0]]))
    np.testing.assert_allclose(sorted(d.values, key=lambda z: z.imag), [-1j, 1j], atol=1e-14)


def test_eig_trivial_sizes():
    d = eig(np.array([[2.5 - 1j]]))
    assert d.values[0] == 2.5 - 1j and d.residuals[0] == 0
    z = eig(np.zeros((4, 4)))
    assert np.all(z.values == 0)


@pytest.mark.parametrize("seed", range(10))
def test_eig_identities_random(seed):
    n = 3 + seed
    a = _rand(n, 100 + seed)
    d = eig(a)
    nrm = np.linalg.norm(a)
    tr = np.trace(a)
    assert abs(d.values.sum() - tr) <= 1e-10 * max(abs(tr), nrm)
    dt = np.linalg.det(a)
    assert abs(np.prod(d.values) - dt) <= 1e-8 * abs(dt)
    assert d.residuals.max() <= 1e-8 * nrm
    np.testing.assert_allclose(np.linalg.norm(d.vectors, axis=0), 1.0)


def test_eig_output_is_sorted_and_phase_fixed():
    d = eig(_rand(9, 5))
    key = list(zip(d.values.real, d.values.imag))
    assert key == sorted(key)
    big = np.abs(d.vectors).argmax(axis=0)
    ph = d.vectors[big, np.arange(9)]
    np.testing.assert_allclose(ph.imag, 0, atol=1e-15)
    assert np.all(ph.real > 0)


def test_eig_similarity_invariance():
    a = _rand(10, 6)
    p = np.eye(10)[np.random.default_rng(1).permutation(10)]
    w1 = eig(a).values
    w2 = eig(p @ a @ p.T).values
    np.testing.assert_allclose(w1, w2, atol=1e-9)


def test_eig_hermitian_chain_closed_form():
    N = 40
    H = build_1d_gainloss(N, 1.0, MassProfile("linear", 0.0, component="imaginary"))
    w = eig(H).values
    assert np.abs(w.imag).max() <= 1e-10
    exact = np.sort(2 * np.cos(np.arange(1, N + 1) * np.pi / (N + 1)))
    np.testing.assert_allclose(np.sort(w.real), exact, atol=1e-8)


def test_eig_lapack_backend_agrees_on_normal_matrix():
    H = build_1d_gainloss(30, 1.0, MassProfile("linear", 0.0, component="imaginary"))
    np.testing.assert_allclose(eig(H).values, eig(H, backend="lapack").values, atol=1e-10)
    with pytest.raises(InvalidSpecError):
        eig(H, backend="magic")


@pytest.mark.parametrize(
    "H",
    [
        build_2d_clm(8, 8, 1.0, 1.0, 0.6),
        build_1d_nonreciprocal(120, 1.0, MassProfile("linear", 0.05)),
        build_1d_gainloss(120, 1.0, MassProfile("random", 0.05, seed=2, component="imaginary")),
    ],
    ids=["2d", "nonreciprocal", "gainloss-random"],
)
def test_model_residuals(H):
    d = eig(H)
    assert d.residuals.max() <= 1e-8 * H.frobenius_norm()


# ---------------------------------------------------------------- stats


def test_participation_ratio_limits():
    assert participation_ratio(np.ones(100)) == pytest.approx(100)
    e = np.zeros(30)
    e[4] = 2.0
    assert participation_ratio(e) == 1.0
    with pytest.raises(InvalidSpecError):
        participation_ratio(np.zeros(5))


def test_participation_ratio_of_gaussian():
    x = np.arange(1, 2001) - 1000.5
    psi = np.exp(-0.0025 * x**2)
    assert participation_ratio(psi) == pytest.approx(np.sqrt(np.pi / 0.0025), rel=0.05)


@given(arrays(complex, st.integers(1, 20), elements=st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)), st.complex_numbers(min_magnitude=1e-3, max_magnitude=1e3, allow_nan=False, allow_infinity=False))
def test_participation_ratio_scale_invariant(psi, c):
    if np.sum(np.abs(psi) ** 4) < 1e-100:
        return
    n = psi.size
    pr = participation_ratio(psi)
    assert 1 - 1e-12 <= pr <= n * (1 + 1e-12)
    assert participation_ratio(c * psi) == pytest.approx(pr, rel=1e-9)


def test_spectrum_table_hermitian_chain():
    N = 50
    H = build_1d_gainloss(N, 1.0, MassProfile("linear", 0.0, component="imaginary"))
    table = spectrum_table(H, eig(H))
    assert len(table) == N and all(isinstance(s, StateStats) for s in table)
    E = np.array([s.E for s in table])
    assert np.all(np.abs(E.real) <= 2) and np.abs(E.imag).max() < 1e-10
    assert table[-1].pr > N / 3
    assert all(np.isnan(s.mean_y) for s in table)
    assert all(1 - 1e-12 <= s.pr <= N for s in table)


def test_spectrum_table_2d_pr_below_ansatz_maximum():
    H = build_2d_clm(30, 30, 1.0, 1.0, 0.3)
    table = spectrum_table(H, eig(H))
    pr_max, _, _ = max_ansatz_pr_2d(Lattice2dParams(1.0, 1.0, 0.3))
    assert max(s.pr for s in table) <= 1.5 * pr_max
    half = H.indexer.half_extent()
    assert all(abs(s.mean_x) <= half[0] and abs(s.mean_y) <= half[1] for s in table)


def test_fit_line_exact():
    x = np.linspace(-3, 3, 12)
    slope, icpt, r2 = fit_line(x, 2 * x + 1)
    assert (slope, icpt, r2) == pytest.approx((2, 1, 1))
    with pytest.raises(InsufficientDataError):
        fit_line([1.0, 1.0], [2.0, 3.0])


def test_linear_trend_needs_interior_states():
    H = build_2d_clm(4, 4, 1.0, 1.0, 0.3)
    table = spectrum_table(H, eig(H))
    with pytest.raises(InsufficientDataError):
        linear_trend(table, "mean_y", "re_E", interior_filter(H.indexer))
    with pytest.raises(InvalidSpecError):
        linear_trend(table, "nope", "re_E")
