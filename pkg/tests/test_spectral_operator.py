"""Discretization, eigendecomposition, and cache checks for the spatial operator."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fracdiff import (
    Grid1D,
    build_operator_matrix,
    build_single_alpha_matrix,
    cache_key,
    cached_eigendecompose,
    eigendecompose,
    load_decomposition,
    save_decomposition,
)
from fracdiff.errors import DomainError


def _mu1(n, alpha1, alpha2):
    grid = Grid1D(n)
    dec = eigendecompose(build_operator_matrix(grid, alpha1, alpha2))
    return dec.mu[0]


def test_grid_validation():
    with pytest.raises(DomainError):
        Grid1D(10)  # even: x = 0 would not be a node
    with pytest.raises(DomainError):
        Grid1D(1)
    with pytest.raises(DomainError):
        Grid1D(7.0)
    with pytest.raises(DomainError):
        Grid1D(True)
    g = Grid1D(9)
    assert g.h == pytest.approx(0.2)
    assert g.nodes[g.center_index] == 0.0


def test_matrix_is_exactly_symmetric():
    grid = Grid1D(11)
    for alpha in (0.5, 1.0, 1.2, 1.9):
        a = build_single_alpha_matrix(grid, alpha)
        assert np.array_equal(a, a.T)


def test_order_bounds_rejected():
    grid = Grid1D(11)
    for alpha in (0.0, 2.0, -0.3, 2.4):
        with pytest.raises(DomainError):
            build_single_alpha_matrix(grid, alpha)


def test_operator_is_sum_of_single_order_parts():
    grid = Grid1D(31)
    combined = build_operator_matrix(grid, 0.5, 1.5).entries
    parts = build_single_alpha_matrix(grid, 0.5) + build_single_alpha_matrix(grid, 1.5)
    assert np.array_equal(combined, parts)


def test_operator_symmetric_in_orders():
    grid = Grid1D(31)
    a = build_operator_matrix(grid, 0.5, 1.5).entries
    b = build_operator_matrix(grid, 1.5, 0.5).entries
    assert np.array_equal(a, b)


def test_eigenvalues_positive_and_sorted():
    dec = eigendecompose(build_operator_matrix(Grid1D(101), 0.5, 1.5))
    assert dec.mu[0] > 0.0
    assert np.all(np.diff(dec.mu) > 0.0)


def test_eigenpair_residual():
    grid = Grid1D(101)
    matrix = build_operator_matrix(grid, 0.5, 1.5)
    dec = eigendecompose(matrix)
    v = dec.phi * math.sqrt(grid.h)
    resid = matrix.entries @ v - v * dec.mu[np.newaxis, :]
    assert np.max(np.abs(resid)) <= 1e-10 * dec.mu[-1]


def test_eigenvectors_orthonormal():
    grid = Grid1D(101)
    dec = eigendecompose(build_operator_matrix(grid, 0.5, 1.5))
    gram = grid.h * dec.phi.T @ dec.phi
    assert np.max(np.abs(gram - np.eye(grid.n_interior))) <= 1e-10


def test_sign_convention_first_max_positive():
    dec = eigendecompose(build_operator_matrix(Grid1D(101), 0.7, 1.3))
    for k in range(dec.mu.size):
        col = dec.phi[:, k]
        assert col[np.argmax(np.abs(col))] > 0.0


def test_ground_state_has_no_sign_change():
    dec = eigendecompose(build_operator_matrix(Grid1D(199), 0.5, 1.5))
    assert np.all(dec.phi[:, 0] > 0.0)


def test_classical_limit_eigenvalues():
    # alpha -> 2 approaches the Dirichlet Laplacian on (-1,1): mu_k = (k pi/2)^2;
    # the (a,a) double operator doubles the single-order spectrum
    dec = eigendecompose(build_operator_matrix(Grid1D(999), 1.999, 1.999))
    for k in (1, 2, 3):
        exact = (k * math.pi / 2.0) ** 2
        assert abs(dec.mu[k - 1] / 2.0 - exact) <= 0.02 * exact


def test_cauchy_order_principal_eigenvalue():
    # alpha = 1 principal eigenvalue of the half Laplacian on (-1,1) is
    # 1.157774 (classical value for the Cauchy process on the interval);
    # the (1,1) double operator is exactly twice the single-order matrix
    dec = eigendecompose(build_operator_matrix(Grid1D(799), 1.0, 1.0))
    assert abs(dec.mu[0] / 2.0 - 1.157774) <= 0.01 * 1.157774


def test_second_order_mesh_convergence():
    mus = [_mu1(n, 0.5, 1.5) for n in (199, 399, 799)]
    ratio = (mus[0] - mus[1]) / (mus[1] - mus[2])
    assert 2.7 <= ratio <= 6.0


def test_eigenvalue_growth_band():
    dec = eigendecompose(build_operator_matrix(Grid1D(199), 0.5, 1.5))
    k = np.arange(1, 51)
    ratio = dec.mu[:50] / (k**0.5 + k**1.5)
    assert ratio.max() / ratio.min() <= 10.0


def test_eigenvalue_growth_slope_tracks_larger_order():
    # log mu_k vs log k slope approaches alpha2 for the larger modes
    dec = eigendecompose(build_operator_matrix(Grid1D(499), 0.5, 1.5))
    k = np.arange(30, 90)
    slope = np.polyfit(np.log(k), np.log(dec.mu[29:89]), 1)[0]
    assert abs(slope - 1.5) <= 0.15


@given(
    n=st.integers(min_value=2, max_value=20).map(lambda m: 2 * m + 1),
    alpha=st.floats(min_value=0.2, max_value=1.8),
)
def test_matrix_structure_properties(n, alpha):
    grid = Grid1D(n)
    a = build_single_alpha_matrix(grid, alpha)
    assert np.array_equal(a, a.T)
    # positive-operator convention: repulsive diagonal, attractive couplings
    assert np.all(np.diag(a) > 0.0)
    assert np.linalg.eigvalsh(a).min() > 0.0


def test_cache_key_order_invariant():
    assert cache_key(199, 0.5, 1.5) == cache_key(199, 1.5, 0.5)
    assert cache_key(199, 0.5, 1.5) != cache_key(199, 0.5, 1.5 + 1e-6)


def test_save_load_roundtrip(tmp_path):
    grid = Grid1D(49)
    dec = eigendecompose(build_operator_matrix(grid, 0.6, 1.4))
    path = str(tmp_path / "dec.bin")
    save_decomposition(dec, path)
    back = load_decomposition(path, grid)
    assert np.array_equal(back.mu, dec.mu)
    assert np.array_equal(back.phi, dec.phi)


def test_cached_eigendecompose_is_stable(tmp_path):
    grid = Grid1D(49)
    matrix = build_operator_matrix(grid, 0.6, 1.4)
    first = cached_eigendecompose(matrix, str(tmp_path))
    second = cached_eigendecompose(matrix, str(tmp_path))
    assert np.array_equal(first.mu, second.mu)
    assert np.array_equal(first.phi, second.phi)


def test_load_rejects_wrong_grid(tmp_path):
    grid = Grid1D(49)
    dec = eigendecompose(build_operator_matrix(grid, 0.6, 1.4))
    path = str(tmp_path / "dec.bin")
    save_decomposition(dec, path)
    with pytest.raises(DomainError):
        load_decomposition(path, Grid1D(51))
