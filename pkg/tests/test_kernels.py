import numpy as np
import pytest
import scipy.special

from gpbounds.errors import DomainError, DuplicatePointError, InvalidParameterError
from gpbounds.kernels import (
    GaussianKernel,
    MaternKernel,
    PointSet,
    TabulatedKernel,
    cross_gram,
    eval_kernel,
    gram_matrix,
)


def test_uniform_grid_properties():
    g = PointSet.uniform_grid(5, 1)
    assert len(g) == 5 and g.d == 1
    assert g.points[0, 0] == 0.0 and g.points[-1, 0] == 1.0
    g2 = PointSet.uniform_grid(3, 2)
    assert len(g2) == 9 and g2.d == 2


def test_midpoint_grid_avoids_boundary():
    g = PointSet.midpoint_grid(4, 1)
    assert np.all(g.points > 0.0) and np.all(g.points < 1.0)
    assert abs(g.points[0, 0] - 0.125) < 1e-15


def test_pointset_validation():
    with pytest.raises(DomainError):
        PointSet.checked(np.array([[1.5]]))
    with pytest.raises(DomainError):
        PointSet.checked(np.array([[-0.2]]))
    with pytest.raises(DuplicatePointError):
        PointSet.checked(np.array([[0.3], [0.3]]))
    # separation tolerance: distinct but closer than 1e-10 is a duplicate
    with pytest.raises(DuplicatePointError):
        PointSet.checked(np.array([[0.3], [0.3 + 1e-12]]))


def test_matern_value_against_scipy():
    """profile(r) = 2^{1-nu}/Gamma(nu) r^nu K_nu(r), nu = s - d/2."""
    k = MaternKernel(2.0, 1)
    assert k.nu == 1.5
    r = np.linspace(1e-6, 1.0, 50)
    want = (2.0 ** (1 - k.nu) / scipy.special.gamma(k.nu)
            * r ** k.nu * scipy.special.kv(k.nu, r))
    got = np.array([eval_kernel(k, 0.0, float(x)) for x in r])
    assert np.max(np.abs(got - want)) < 1e-12


def test_matern_requires_s_above_d():
    with pytest.raises(InvalidParameterError):
        MaternKernel(1.0, 1)
    with pytest.raises(InvalidParameterError):
        MaternKernel(2.0, 2)
    MaternKernel(2.5, 2)  # fine


def test_gram_matrix_symmetric_psd_unit_diag():
    for spec in (MaternKernel(2.0, 1), GaussianKernel(1)):
        grid = PointSet.uniform_grid(33, 1)
        G = gram_matrix(spec, grid)
        assert np.array_equal(G, G.T)
        assert np.all(np.diag(G) == 1.0)
        w = np.linalg.eigvalsh(G)
        assert w.min() > -1e-10


def test_gram_2d_matches_cross():
    spec = MaternKernel(3.0, 2)
    rng = np.random.default_rng(3)
    pts = PointSet.checked(rng.uniform(0, 1, size=(20, 2)))
    G = gram_matrix(spec, pts)
    C = cross_gram(spec, pts, pts)
    assert np.max(np.abs(G - C)) < 1e-14


def test_gaussian_kernel_value():
    k = GaussianKernel(1)
    assert abs(eval_kernel(k, 0.2, 0.7) - np.exp(-0.25)) < 1e-15


def test_dimension_mismatch_is_domain_error():
    spec = MaternKernel(2.0, 1)
    with pytest.raises(DomainError):
        eval_kernel(spec, np.array([0.1, 0.2]), np.array([0.3, 0.4]))


def test_tabulated_kernel_round_trip():
    """Tabulating a Matern on a grid and evaluating on the same grid must
    reproduce the dense Gram matrix exactly."""
    base = MaternKernel(2.0, 1)
    grid = PointSet.uniform_grid(65, 1)
    G = gram_matrix(base, grid)
    tab = TabulatedKernel(grid, G)
    assert np.array_equal(gram_matrix(tab, grid), G)


def test_tabulated_kernel_snaps_and_rejects():
    base = GaussianKernel(1)
    grid = PointSet.uniform_grid(17, 1)
    tab = TabulatedKernel(grid, gram_matrix(base, grid))
    jitter = PointSet.checked(np.clip(grid.points + 1e-12, 0.0, 1.0))
    assert np.array_equal(gram_matrix(tab, jitter), gram_matrix(tab, grid))
    with pytest.raises(DomainError):
        eval_kernel(tab, 0.5 + 0.011, 0.0)


def test_tabulated_kernel_rejects_asymmetric_and_indefinite():
    grid = PointSet.uniform_grid(4, 1)
    bad = np.arange(16.0).reshape(4, 4)
    with pytest.raises(InvalidParameterError):
        TabulatedKernel(grid, bad)
    indef = np.eye(4)
    indef[0, 1] = indef[1, 0] = 2.0  # eigenvalue -1
    with pytest.raises(InvalidParameterError):
        TabulatedKernel(grid, indef)
