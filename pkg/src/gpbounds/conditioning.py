"""Kriging engine: posterior mean/variance under point conditioning, with an
incrementally extended Cholesky factor, power-function greedy selection, and
exact eigenspace conditioning for finite-rank covariances.

Conventions
-----------
The "power" of a point is its posterior variance k(t,t) - v(t)^T G^{-1} v(t);
its square root is the classical power function.  Breakdown tolerances are on
the square-root scale: a new design point is rejected when the new Cholesky
diagonal (= its power function value) falls below POWER_TOL, and greedy
selection stops when no candidate exceeds it.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from . import _core
from .errors import (
    ConfigError,
    DimensionMismatchError,
    DuplicatePointError,
    ExhaustedCandidatesError,
    InvalidParameterError,
    NumericalBreakdownError,
)
from .kernels import SEPARATION_TOL, KernelSpec, PointSet, cross_gram, gram_matrix

POWER_TOL = 1.0e-14  # sqrt-of-variance breakdown / exhaustion threshold
TRACE_SLACK = 1.0e-10  # allowed round-off uptick in (supposedly) monotone traces


@dataclass(frozen=True)
class PowerTrace:
    """Max-over-grid posterior variance after 0, 1, ..., N selections."""

    values: np.ndarray
    grid: PointSet

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "values", v)
        if v.size == 0:
            raise InvalidParameterError("empty trace")
        if v.min() < 0.0:
            raise InvalidParameterError("trace values must be nonnegative")
        if np.any(np.diff(v) > TRACE_SLACK):
            raise InvalidParameterError("trace must be nonincreasing")

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class DesignState:
    """n selected points plus the lower Cholesky factor of their Gram matrix.

    Immutable; ``add_point`` returns a new state with the factor extended by
    one bordered row in O(n^2).
    """

    spec: KernelSpec
    selected: PointSet
    chol: np.ndarray

    @staticmethod
    def empty(spec: KernelSpec) -> "DesignState":
        return DesignState(spec, PointSet(np.empty((0, spec.d))), np.empty((0, 0)))

    @property
    def n(self) -> int:
        return len(self.selected)

    # -- vectorized internals (the scalar ops below wrap these) --------------

    def _solved_cross(self, pts: np.ndarray) -> np.ndarray:
        """W = L^{-1} K(selected, pts), shape (n, m)."""
        V = cross_gram(self.spec, self.selected, PointSet(pts))
        return solve_triangular(self.chol, V, lower=True, check_finite=False)

    def variance_field(self, pts) -> np.ndarray:
        pts = np.asarray(pts, dtype=np.float64)
        if pts.ndim == 1:
            pts = pts[:, None]
        kd = self.spec.diag(pts)
        if self.n == 0:
            return kd.copy()
        W = self._solved_cross(pts)
        var = kd - np.sum(W * W, axis=0)
        return np.clip(var, 0.0, kd)

    def mean_field(self, obs, pts) -> np.ndarray:
        obs = np.asarray(obs, dtype=np.float64).ravel()
        if obs.shape[0] != self.n:
            raise DimensionMismatchError(f"expected {self.n} observations, got {obs.shape[0]}")
        pts = np.asarray(pts, dtype=np.float64)
        if pts.ndim == 1:
            pts = pts[:, None]
        if self.n == 0:
            return np.zeros(pts.shape[0])
        z = solve_triangular(self.chol, obs, lower=True, check_finite=False)
        coeff = solve_triangular(self.chol.T, z, lower=False, check_finite=False)
        V = cross_gram(self.spec, self.selected, PointSet(pts))
        return V.T @ coeff


def _one_point(t) -> np.ndarray:
    a = np.atleast_1d(np.asarray(t, dtype=np.float64))
    return a[None, :] if a.ndim == 1 else a


def posterior_variance(state: DesignState, t) -> float:
    """k(t,t) - v(t)^T G^{-1} v(t), clamped to [0, k(t,t)]."""
    return float(state.variance_field(_one_point(t))[0])


def posterior_mean(state: DesignState, obs, t) -> float:
    """Kernel interpolant of the observations, evaluated at t."""
    if state.n < 1:
        raise DimensionMismatchError("posterior_mean needs at least one observation")
    return float(state.mean_field(obs, _one_point(t))[0])


def add_point(state: DesignState, t) -> DesignState:
    """Extend the design by one point (bordered Cholesky update)."""
    new = PointSet(_one_point(t))
    kd = float(state.spec.diag(new.points)[0])
    if state.n:
        dist2 = np.sum((state.selected.points - new.points) ** 2, axis=1)
        if dist2.min() < SEPARATION_TOL**2:
            raise DuplicatePointError("new point duplicates a design point")
        v = cross_gram(state.spec, state.selected, new)[:, 0]
        w = solve_triangular(state.chol, v, lower=True, check_finite=False)
        diag2 = kd - float(w @ w)
    else:
        w = np.empty(0)
        diag2 = kd
    diag = np.sqrt(max(diag2, 0.0))
    if diag < POWER_TOL:
        raise NumericalBreakdownError(
            f"power function {diag:.3e} below {POWER_TOL:.0e} at the new point"
        )
    n = state.n
    L = np.zeros((n + 1, n + 1))
    L[:n, :n] = state.chol
    L[n, :n] = w
    L[n, n] = diag
    pts = np.vstack([state.selected.points, new.points])
    return DesignState(state.spec, PointSet(pts), L)


@dataclass(frozen=True)
class GreedyResult:
    """Everything the greedy run produced: selection order, Newton basis rows
    over the candidate grid, the power trace, and the equivalent DesignState."""

    indices: np.ndarray
    newton_rows: np.ndarray  # (n, m): row j is the j-th Newton basis on the grid
    trace: PowerTrace
    design: PointSet
    state: DesignState

    def interpolation_matrix(self, spec: KernelSpec, targets: PointSet, n: int) -> np.ndarray:
        """A (n, m_targets) with posterior mean = obs @ A for the first n picks."""
        L = self.state.chol[:n, :n]
        V = cross_gram(spec, PointSet(self.design.points[:n]), targets)
        W = solve_triangular(L, V, lower=True, check_finite=False)
        return solve_triangular(L.T, W, lower=False, check_finite=False)


def greedy_design(
    spec: KernelSpec, candidates: PointSet, N: int, *, allow_partial: bool = False
) -> GreedyResult:
    """Run power-function greedy selection for up to N points.

    Stops early when every remaining candidate's power function is below
    POWER_TOL (the candidate Gram matrix is numerically exhausted); that is an
    ExhaustedCandidatesError unless ``allow_partial`` is set, in which case
    the achieved prefix is returned.
    """
    if N < 1:
        raise ConfigError("N must be >= 1")
    if len(candidates) < N:
        raise ConfigError("need at least N candidates")
    K = gram_matrix(spec, candidates)
    idx, V, tr = _core.newton_greedy(K, N, POWER_TOL)
    k = len(idx)
    design = PointSet(candidates.points[idx])
    trace = PowerTrace(tr, candidates)
    # the lower triangle of V restricted to the selected columns IS the
    # incremental Cholesky factor of the design Gram matrix
    L = np.tril(V[:, idx].T)
    state = DesignState(spec, design, L)
    result = GreedyResult(idx, V, trace, design, state)
    if k < N and not allow_partial:
        raise ExhaustedCandidatesError(
            f"candidates exhausted after {k} of {N} selections "
            f"(max remaining power {tr[-1]:.3e})",
            partial=result,
        )
    return result


def pgreedy_select(spec: KernelSpec, candidates: PointSet, N: int, *, allow_partial: bool = False):
    """P-greedy selection: returns (selected PointSet, PowerTrace)."""
    res = greedy_design(spec, candidates, N, allow_partial=allow_partial)
    return res.design, res.trace


@dataclass(frozen=True)
class FiniteRankCov:
    """Finite-rank covariance sum_j lambda_j sum_m phi_{j,m} phi_{j,m}^T on a
    weighted grid; eigenvalues are per-eigenspace with multiplicities dims."""

    eigenvalues: np.ndarray  # (J,) strictly positive, nonincreasing
    dims: np.ndarray  # (J,) positive ints
    basis: np.ndarray  # (m, sum(dims)) columns orthonormal under weights
    grid: PointSet
    weights: np.ndarray  # (m,) positive quadrature weights

    ORTHO_TOL = 1.0e-8

    def __post_init__(self):
        lam = np.asarray(self.eigenvalues, dtype=np.float64)
        dims = np.asarray(self.dims, dtype=np.int64)
        object.__setattr__(self, "eigenvalues", lam)
        object.__setattr__(self, "dims", dims)
        if lam.size == 0 or np.any(lam <= 0):
            raise InvalidParameterError("eigenvalues must be positive")
        if np.any(np.diff(lam) > 0):
            raise InvalidParameterError("eigenvalues must be nonincreasing")
        if np.any(dims < 1):
            raise InvalidParameterError("eigenspace dims must be >= 1")
        if self.basis.shape != (len(self.grid), int(dims.sum())):
            raise InvalidParameterError("basis shape mismatch")
        G = self.basis.T @ (self.weights[:, None] * self.basis)
        if np.max(np.abs(G - np.eye(G.shape[0]))) > self.ORTHO_TOL:
            raise InvalidParameterError("basis columns not orthonormal under the weights")

    @property
    def J(self) -> int:
        return len(self.eigenvalues)

    def lambda_modes(self) -> np.ndarray:
        """Eigenvalue per basis column (eigenspaces expanded)."""
        return np.repeat(self.eigenvalues, self.dims)

    def kernel_matrix(self, keep: int | None = None) -> np.ndarray:
        """Grid kernel matrix of the (optionally truncated) covariance."""
        lam = self.lambda_modes().copy()
        if keep is not None:
            lam[int(np.sum(self.dims[:keep])) :] = 0.0
        return (self.basis * lam) @ self.basis.T


def cosine_basis_cov(eigenvalues, dims=None, m: int = 257) -> FiniteRankCov:
    """FiniteRankCov on the 1-d midpoint grid with the cosine orthonormal
    system (discretely exactly orthonormal for mode count <= m)."""
    lam = np.asarray(eigenvalues, dtype=np.float64)
    if dims is None:
        dims = np.ones(len(lam), dtype=np.int64)
    dims = np.asarray(dims, dtype=np.int64)
    total = int(dims.sum())
    if total > m:
        raise InvalidParameterError("more modes than grid nodes")
    grid = PointSet.midpoint_grid(m)
    x = grid.points[:, 0]
    cols = [np.ones(m)]
    for k in range(1, total):
        cols.append(np.sqrt(2.0) * np.cos(k * np.pi * x))
    basis = np.stack(cols, axis=1)
    weights = np.full(m, 1.0 / m)
    return FiniteRankCov(lam, dims, basis, grid, weights)


def eigen_condition_gap(cov: FiniteRankCov, n: int) -> float:
    """Operator-norm gap after conditioning on the first n eigenspaces: the
    (n+1)-th eigenvalue, or 0 once everything is conditioned."""
    if n < 0:
        raise InvalidParameterError("n must be >= 0")
    if n >= cov.J:
        return 0.0
    return float(cov.eigenvalues[n])


def truncation_opnorm_gap(cov: FiniteRankCov, n: int) -> float:
    """Independent check of eigen_condition_gap: operator norm (largest
    magnitude eigenvalue) of W^(1/2) (K - K_n) W^(1/2) built on the grid."""
    R = cov.kernel_matrix() - cov.kernel_matrix(keep=n)
    sw = np.sqrt(cov.weights)
    A = sw[:, None] * R * sw[None, :]
    return float(np.max(np.abs(np.linalg.eigvalsh(A))))
