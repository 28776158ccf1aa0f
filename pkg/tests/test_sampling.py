import numpy as np
import pytest

from gpbounds.conditioning import DesignState, add_point, greedy_design
from gpbounds.errors import DomainError, InvalidParameterError
from gpbounds.kernels import GaussianKernel, MaternKernel, PointSet, gram_matrix
from gpbounds.sampling import (
    build_spectral_model,
    path_matrix,
    sample_path,
    snap_to_grid,
    sup_error,
)
from gpbounds.streams import LANE_PATHS, generator, stream_key


def test_model_respects_tail_budget():
    grid = PointSet.uniform_grid(129, 1)
    for spec in (MaternKernel(2.0, 1), GaussianKernel(1)):
        for budget in (1e-3, 1e-6, 1e-9):
            model = build_spectral_model(spec, grid, budget)
            assert model.discarded_mass <= budget * model.trace * (1.0 + 1e-12)
            assert np.all(np.diff(model.eigenvalues) <= 0)
            assert model.eigenvalues.min() > 0


def test_rank_grows_as_budget_shrinks():
    grid = PointSet.uniform_grid(129, 1)
    spec = MaternKernel(2.0, 1)
    ranks = [build_spectral_model(spec, grid, b).rank for b in (1e-3, 1e-6, 1e-9)]
    assert ranks[0] < ranks[1] < ranks[2]


def test_basis_weighted_orthonormal():
    grid = PointSet.uniform_grid(65, 1)
    model = build_spectral_model(MaternKernel(2.0, 1), grid, 1e-6)
    G = model.basis.T @ model.basis / len(grid)
    assert np.max(np.abs(G - np.eye(model.rank))) < 1e-10


def test_model_reconstructs_gram():
    """phi diag(lam) phi^T approximates K with sup-norm error controlled by
    the discarded diagonal mass."""
    grid = PointSet.uniform_grid(65, 1)
    spec = MaternKernel(2.0, 1)
    model = build_spectral_model(spec, grid, 1e-9)
    K = gram_matrix(spec, grid)
    K_hat = (model.basis * model.eigenvalues) @ model.basis.T
    err = np.max(np.abs(K - K_hat))
    # off-diagonal truncation error is bounded through the diagonal one
    assert err <= model.tail_diag_sup + 1e-12
    assert model.tail_diag_sup < 1e-6


def test_path_moments():
    """Seeded loop: sample paths and check mean/variance against the kernel."""
    grid = PointSet.uniform_grid(33, 1)
    spec = GaussianKernel(1)
    model = build_spectral_model(spec, grid, 1e-9)
    rng = generator(2024, LANE_PATHS, 0)
    M = 4000
    xi = rng.standard_normal((M, model.rank))
    paths = path_matrix(model, xi)
    assert paths.shape == (M, 33)
    mean = paths.mean(axis=0)
    var = paths.var(axis=0)
    assert np.max(np.abs(mean)) < 5.0 / np.sqrt(M)
    assert np.max(np.abs(var - 1.0)) < 0.15  # Var k(t,t)=1, sampling noise


def test_path_covariance_matches_kernel():
    grid = PointSet.uniform_grid(17, 1)
    spec = MaternKernel(2.0, 1)
    model = build_spectral_model(spec, grid, 1e-9)
    rng = np.random.default_rng(5)
    xi = rng.standard_normal((20000, model.rank))
    paths = path_matrix(model, xi)
    emp = np.cov(paths.T)
    K = gram_matrix(spec, grid)
    assert np.max(np.abs(emp - K)) < 0.08


def test_sample_path_deterministic_in_key():
    grid = PointSet.uniform_grid(33, 1)
    model = build_spectral_model(GaussianKernel(1), grid, 1e-9)
    key = stream_key(99, LANE_PATHS, 3)
    p1 = sample_path(model, key)
    p2 = sample_path(model, key)
    assert np.array_equal(p1.values, p2.values)
    p3 = sample_path(model, stream_key(99, LANE_PATHS, 4))
    assert not np.array_equal(p1.values, p3.values)


def test_snap_to_grid():
    grid = PointSet.uniform_grid(11, 1)
    idx = snap_to_grid(grid, np.array([[0.0], [0.1 + 1e-12], [1.0]]))
    assert idx.tolist() == [0, 1, 10]
    with pytest.raises(DomainError):
        snap_to_grid(grid, np.array([[1.2]]))  # beyond half a spacing of any node


def test_sup_error_zero_when_design_spans_path():
    """Conditioning on every retained mode's worth of points makes the
    residual collapse to numerical zero."""
    grid = PointSet.uniform_grid(65, 1)
    spec = GaussianKernel(1)
    model = build_spectral_model(spec, grid, 1e-3)
    res = greedy_design(spec, grid, model.rank + 4, allow_partial=True)
    path = sample_path(model, stream_key(7, LANE_PATHS, 0))
    e_empty = sup_error(path, DesignState.empty(spec))
    assert e_empty == float(np.abs(path.values).max())
    e_full = sup_error(path, res.state)
    assert e_full < 1e-5 * max(e_empty, 1.0)


def test_sup_error_decreases_along_design():
    grid = PointSet.uniform_grid(129, 1)
    spec = MaternKernel(2.0, 1)
    model = build_spectral_model(spec, grid, 1e-9)
    res = greedy_design(spec, grid, 16)
    path = sample_path(model, stream_key(21, LANE_PATHS, 5))
    errs = []
    state = DesignState.empty(spec)
    for x in res.design.points[:, 0]:
        state = add_point(state, x)
        errs.append(sup_error(path, state))
    # not strictly monotone path-by-path, but must trend down overall
    assert errs[-1] < 0.2 * errs[0]


def test_budget_validation():
    grid = PointSet.uniform_grid(33, 1)
    with pytest.raises(InvalidParameterError):
        build_spectral_model(GaussianKernel(1), grid, 0.0)
    with pytest.raises(InvalidParameterError):
        build_spectral_model(GaussianKernel(1), grid, 0.2)
