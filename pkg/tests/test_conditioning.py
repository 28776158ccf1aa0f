"""Posterior conditioning against direct dense solves, greedy selection
behaviour, and the truncated-covariance operator-norm identity."""

import numpy as np
import pytest

from gpbounds.conditioning import (
    DesignState,
    FiniteRankCov,
    PowerTrace,
    add_point,
    cosine_basis_cov,
    eigen_condition_gap,
    greedy_design,
    pgreedy_select,
    truncation_opnorm_gap,
)
from gpbounds.errors import (
    DuplicatePointError,
    ExhaustedCandidatesError,
    InvalidParameterError,
    NumericalBreakdownError,
)
from gpbounds.kernels import GaussianKernel, MaternKernel, PointSet, gram_matrix


def _direct_posterior(spec, design, t, obs=None):
    """Reference implementation: one dense solve, no factor reuse."""
    from gpbounds.kernels import cross_gram
    K = gram_matrix(spec, PointSet(design))
    v = cross_gram(spec, PointSet(design), PointSet(np.array([[t]])))[:, 0]
    sol = np.linalg.solve(K, v)
    var = float(spec.diag(np.array([[t]]))[0]) - float(v @ sol)
    mean = None if obs is None else float(obs @ sol)
    return var, mean


def test_posterior_against_direct_solve():
    spec = MaternKernel(2.0, 1)
    rng = np.random.default_rng(11)
    for trial in range(10):
        design = np.sort(rng.choice(np.linspace(0, 1, 101), size=7, replace=False))[:, None]
        obs = rng.normal(size=7)
        state = DesignState.empty(spec)
        for x in design[:, 0]:
            state = add_point(state, x)
        for t in rng.uniform(0, 1, size=5):
            var_direct, mean_direct = _direct_posterior(spec, design, float(t), obs)
            from gpbounds.conditioning import posterior_mean, posterior_variance
            # tolerance tracks the Gram condition number (up to ~1e7 here)
            assert abs(posterior_variance(state, float(t)) - max(var_direct, 0.0)) < 1e-10
            assert abs(posterior_mean(state, obs, float(t)) - mean_direct) < 1e-7


def test_posterior_interpolates_observations():
    spec = GaussianKernel(1)
    xs = np.array([0.1, 0.35, 0.6, 0.9])
    obs = np.array([1.0, -2.0, 0.5, 3.0])
    state = DesignState.empty(spec)
    for x in xs:
        state = add_point(state, x)
    from gpbounds.conditioning import posterior_mean, posterior_variance
    for x, y in zip(xs, obs):
        assert abs(posterior_mean(state, obs, x) - y) < 1e-10
        assert posterior_variance(state, x) < 1e-10


def test_add_point_rejects_duplicates_and_breakdown():
    spec = GaussianKernel(1)
    state = add_point(DesignState.empty(spec), 0.5)
    with pytest.raises(DuplicatePointError):
        add_point(state, 0.5)
    with pytest.raises(DuplicatePointError):
        add_point(state, 0.5 + 1e-11)  # closer than the separation tolerance
    # a rank-deficient kernel breaks down at the second point even though the
    # points themselves are well separated
    from gpbounds.kernels import TabulatedKernel
    grid = PointSet.uniform_grid(3, 1)
    u = np.array([1.0, 0.9, 0.8])
    rank1 = TabulatedKernel(grid, np.outer(u, u))
    st = add_point(DesignState.empty(rank1), 0.0)
    with pytest.raises(NumericalBreakdownError):
        add_point(st, 0.5)


def test_variance_field_clipped_nonnegative():
    spec = MaternKernel(2.0, 1)
    grid = PointSet.uniform_grid(201, 1)
    res = greedy_design(spec, grid, 15)
    var = res.state.variance_field(grid.points)
    assert var.min() >= 0.0
    assert var.max() <= 1.0 + 1e-12


def test_greedy_first_picks_symmetric_grid():
    """On a symmetric grid with a stationary kernel the first pick is the
    first argmax (index 0), then the far end, then near the middle."""
    spec = MaternKernel(2.0, 1)
    grid = PointSet.uniform_grid(65, 1)
    res = greedy_design(spec, grid, 3)
    assert res.indices[0] == 0
    assert res.indices[1] == 64
    assert res.indices[2] == 32


def test_greedy_trace_matches_variance_field():
    """trace[k] must equal the max over the grid of the posterior variance of
    the k-point design (recomputed independently from scratch)."""
    spec = MaternKernel(2.0, 1)
    grid = PointSet.uniform_grid(101, 1)
    res = greedy_design(spec, grid, 8)
    for k in (0, 1, 4, 8):
        state = DesignState.empty(spec)
        for x in res.design.points[:k, 0]:
            state = add_point(state, x)
        expect = state.variance_field(grid.points).max()
        assert abs(res.trace.values[k] - expect) < 1e-9, k


def test_greedy_newton_rows_reconstruct_gram():
    """V^T V over selected columns reproduces the design Gram matrix (the
    Newton rows are a square root of it)."""
    spec = GaussianKernel(1)
    grid = PointSet.uniform_grid(51, 1)
    res = greedy_design(spec, grid, 6)
    V = res.newton_rows[:, res.indices]
    K = gram_matrix(spec, res.design)
    assert np.max(np.abs(V.T @ V - K)) < 1e-10


def test_greedy_exhaustion_partial():
    spec = GaussianKernel(1)
    grid = PointSet.uniform_grid(33, 1)
    with pytest.raises(ExhaustedCandidatesError) as ei:
        greedy_design(spec, grid, 33)
    partial = ei.value.partial
    assert partial is not None and partial.state.n < 33
    res = greedy_design(spec, grid, 33, allow_partial=True)
    assert res.state.n == partial.state.n
    assert len(res.trace) == res.state.n + 1


def test_pgreedy_select_wrapper():
    spec = MaternKernel(2.0, 1)
    grid = PointSet.uniform_grid(65, 1)
    design, trace = pgreedy_select(spec, grid, 5)
    assert len(design) == 5
    assert len(trace) == 6
    assert trace.values[0] == 1.0


def test_interpolation_matrix_prefix_consistency():
    """Interpolation through the stored factor at n < N equals the matrix of
    a fresh n-point greedy run."""
    spec = MaternKernel(2.0, 1)
    grid = PointSet.uniform_grid(129, 1)
    res = greedy_design(spec, grid, 12)
    targets = PointSet.uniform_grid(33, 1)
    A_prefix = res.interpolation_matrix(spec, targets, 5)
    res5 = greedy_design(spec, grid, 5)
    A_fresh = res5.interpolation_matrix(spec, targets, 5)
    assert np.max(np.abs(A_prefix - A_fresh)) < 1e-10


def test_power_trace_validation():
    grid = PointSet.uniform_grid(3, 1)
    with pytest.raises(InvalidParameterError):
        PowerTrace(np.array([1.0, 0.5, 0.6]), grid)
    with pytest.raises(InvalidParameterError):
        PowerTrace(np.array([1.0, -0.1]), grid)


def test_eigen_gap_identity_quadratic_decay():
    """Operator-norm of the rank-n truncation remainder equals the (n+1)-th
    eigenvalue for lambda_j = (j+1)^-2, all n below the rank."""
    J = 32
    lam = (np.arange(J) + 1.0) ** -2.0
    cov = cosine_basis_cov(lam)
    for n in range(J):
        gap = eigen_condition_gap(cov, n)
        op = truncation_opnorm_gap(cov, n)
        assert abs(op - gap) / gap < 1e-8, n
    assert eigen_condition_gap(cov, J) == 0.0
    assert truncation_opnorm_gap(cov, J) < 1e-14


def test_eigen_gap_with_multiplicities():
    lam = np.array([1.0, 0.25, 0.0625])
    dims = np.array([1, 2, 3])
    cov = cosine_basis_cov(lam, dims)
    assert cov.lambda_modes().tolist() == [1.0, 0.25, 0.25, 0.0625, 0.0625, 0.0625]
    for n in range(3):
        assert abs(truncation_opnorm_gap(cov, n) - lam[n]) / lam[n] < 1e-8


def test_finite_rank_cov_validation():
    lam = np.array([1.0, 2.0])  # increasing: invalid
    with pytest.raises(InvalidParameterError):
        cosine_basis_cov(lam)
    with pytest.raises(InvalidParameterError):
        cosine_basis_cov(np.array([1.0, -0.5]))
    with pytest.raises(InvalidParameterError):
        cosine_basis_cov(np.ones(10), m=5)  # more modes than nodes
