import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clmkit import InvalidSpecError
from clmkit.lattice import (
    HamiltonianMatrix,
    LatticeOperator,
    MassProfile,
    SiteIndexer,
    apply,
    build_1d_gainloss,
    build_1d_nonreciprocal,
    build_2d_clm,
    export_matrix_text,
    load_matrix_text,
)
from clmkit.spectral import eig


@given(st.integers(1, 12), st.integers(1, 12))
def test_indexer_is_bijective(Lx, Ly):
    ix = SiteIndexer((Lx, Ly))
    seen = set()
    for idx in range(ix.n):
        site = ix.site(idx)
        assert ix.index(*site) == idx
        seen.add(site)
    assert len(seen) == Lx * Ly


def test_indexer_row_major_and_centered():
    ix = SiteIndexer((3, 2))
    assert ix.index(1, 1) == 0
    assert ix.index(3, 1) == 2
    assert ix.index(1, 2) == 3
    x, y = ix.positions()
    assert x[0] == -1.0 and y[0] == -0.5
    (xc,) = SiteIndexer((4,)).positions()
    np.testing.assert_array_equal(xc, [-1.5, -0.5, 0.5, 1.5])


def test_2d_structure_without_field():
    H = build_2d_clm(2, 2, 1.0, 1.0, 0.0)
    a, ix = H.entries, H.indexer
    assert np.all(np.diag(a) == 0)
    assert a[ix.index(1, 1), ix.index(2, 1)] == 1
    assert a[ix.index(2, 1), ix.index(1, 1)] == 1
    # <r - y|H|r> = +ty and <r|H|r - y> = -ty
    assert a[ix.index(1, 1), ix.index(1, 2)] == 1
    assert a[ix.index(1, 2), ix.index(1, 1)] == -1


def test_2d_onsite_mass_uses_centered_coordinates():
    H = build_2d_clm(2, 2, 1.0, 1.0, 0.3)
    assert H.entries[0, 0] == pytest.approx(-0.15 + 0.15j)
    x, y = H.indexer.positions()
    np.testing.assert_allclose(np.diag(H.entries), 0.3 * (y - 1j * x))


def test_2d_full_size_is_non_hermitian():
    H = build_2d_clm(60, 60, 1.0, 1.0, 0.3)
    assert H.n == 3600
    assert H.hermiticity_defect() > 0


def test_nonreciprocal_small_chain():
    H = build_1d_nonreciprocal(3, 1.0, MassProfile("linear", 0.01))
    np.testing.assert_allclose(np.diag(H.entries), [-0.01, 0, 0.01])
    assert H.entries[1, 0] == 1 and H.entries[0, 1] == -1
    assert H.hermiticity_defect() > 0


def test_nonreciprocal_full_size_diagonal_span():
    H = build_1d_nonreciprocal(2000, 1.0, MassProfile("linear", 0.01))
    d = np.diag(H.entries).real
    assert H.n == 2000
    assert d.min() == pytest.approx(-9.995) and d.max() == pytest.approx(9.995)


def test_random_masses_are_bounded_and_reproducible():
    m = MassProfile("random", 0.01, seed=7)
    H1 = build_1d_nonreciprocal(4, 1.0, m)
    H2 = build_1d_nonreciprocal(4, 1.0, MassProfile("random", 0.01, seed=7))
    assert np.all(np.abs(np.diag(H1.entries)) <= 0.02)
    assert np.array_equal(H1.entries, H2.entries)
    assert "seed7" in H1.model_tag


def test_random_gainloss_diagonal_is_imaginary():
    H = build_1d_gainloss(2000, 1.0, MassProfile("random", 0.01, seed=11, component="imaginary"))
    d = np.diag(H.entries)
    assert np.all(d.real == 0)
    assert np.all(np.abs(d.imag) <= 10)


def test_gainloss_small_chain_and_hermitian_limit():
    H = build_1d_gainloss(3, 1.0, MassProfile("linear", 0.01, component="imaginary"))
    np.testing.assert_allclose(np.diag(H.entries), [-0.01j, 0, 0.01j])
    assert H.entries[0, 1] == H.entries[1, 0] == 1
    H0 = build_1d_gainloss(2, 1.0, MassProfile("linear", 0.0, component="imaginary"))
    np.testing.assert_array_equal(H0.entries, [[0, 1], [1, 0]])
    assert H0.hermiticity_defect() == 0.0


def test_wrong_mass_component_is_rejected():
    with pytest.raises(InvalidSpecError):
        build_1d_nonreciprocal(5, 1.0, MassProfile("linear", 0.1, component="imaginary"))
    with pytest.raises(InvalidSpecError):
        build_1d_gainloss(5, 1.0, MassProfile("linear", 0.1, component="real"))


@pytest.mark.parametrize("dims", [(1, 5), (5, 1), (0, 3)])
def test_small_dimensions_rejected(dims):
    with pytest.raises(InvalidSpecError):
        build_2d_clm(*dims, 1.0, 1.0, 0.1)


def test_small_chain_rejected():
    with pytest.raises(InvalidSpecError):
        build_1d_gainloss(1, 1.0, MassProfile("linear", 0.1, component="imaginary"))


def test_matrix_is_immutable():
    H = build_2d_clm(3, 3, 1.0, 1.0, 0.1)
    with pytest.raises(ValueError):
        H.entries[0, 0] = 1.0


def _models():
    return [
        build_2d_clm(5, 4, 1.0, 0.7, 0.3),
        build_1d_nonreciprocal(9, 1.0, MassProfile("linear", 0.2)),
        build_1d_gainloss(9, 0.8, MassProfile("random", 0.2, seed=3, component="imaginary")),
    ]


@pytest.mark.parametrize("H", _models(), ids=["2d", "nonreciprocal", "gainloss"])
def test_only_nearest_neighbour_bonds(H):
    pos = np.stack(H.indexer.positions())
    a = H.entries
    for r, c in zip(*np.nonzero(a)):
        if r != c:
            assert np.abs(pos[:, r] - pos[:, c]).sum() == 1


@pytest.mark.parametrize("H", _models(), ids=["2d", "nonreciprocal", "gainloss"])
def test_matrix_free_apply_matches_dense(H):
    v = np.random.default_rng(2).standard_normal(H.n) + 1j * np.random.default_rng(3).standard_normal(H.n)
    op = H.operator()
    np.testing.assert_allclose(op.apply(v), H.entries @ v, atol=1e-13)
    assert isinstance(op, LatticeOperator)


def test_apply_examples():
    H = build_1d_gainloss(2, 1.0, MassProfile("linear", 0.0, component="imaginary"))
    np.testing.assert_array_equal(apply(H, np.array([1, 0])), [0, 1])
    c = 0.4 - 1.1j
    v = np.array([0.3, -2.0j])
    np.testing.assert_allclose(apply(H.shifted(c), v), apply(H, v) + c * v)
    with pytest.raises(InvalidSpecError):
        apply(H, np.ones(3))


def test_apply_matches_naive_rows():
    rng = np.random.default_rng(8)
    a = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
    v = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    naive = np.array([sum(a[i, j] * v[j] for j in range(8)) for i in range(8)])
    np.testing.assert_allclose(apply(a, v), naive, atol=1e-14)


@settings(max_examples=10, deadline=None)
@given(st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False))
def test_shift_moves_every_eigenvalue(c):
    H = build_2d_clm(3, 3, 1.0, 1.0, 0.4)
    w0 = eig(H).values
    w1 = eig(H.shifted(c)).values
    d = np.abs((w0 + c)[:, None] - w1[None, :]).min(axis=1)
    assert d.max() <= 1e-10 * max(1.0, np.abs(w1).max())


def test_text_export_round_trip(tmp_path):
    for H in _models():
        p = tmp_path / "h.txt"
        export_matrix_text(H, p)
        head = p.read_text().splitlines()[0].split()
        assert head[0] == str(H.n) and head[1] == H.model_tag
        G = load_matrix_text(p)
        assert isinstance(G, HamiltonianMatrix)
        np.testing.assert_array_equal(G.entries, H.entries)
        assert G.indexer.dims == H.indexer.dims
        assert dict(G.params) == dict(H.params)
