"""Path sampling via a truncated spectral (Karhunen-Loève / Nyström) model,
and sup-norm error between a path and its conditional expectation.

The spectral model is an explicit, honest approximation of the field: its
discarded eigenvalue mass and the sup of the discarded pointwise variance are
recorded so downstream reports can state how much the truncation can bias
sup-norm errors (downward, by at most a tail-variance-scale quantity).
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvalidParameterError, TruncationUnreachableError
from .kernels import KernelSpec, PointSet, gram_matrix
from .conditioning import DesignState

RANK_TOL_REL = 1.0e-14  # retained eigenvalues must exceed this times the largest


@dataclass(frozen=True)
class SpectralModel:
    grid: PointSet
    weights: np.ndarray  # uniform quadrature weights, summing to the volume 1
    eigenvalues: np.ndarray  # (r,) nonincreasing, positive
    basis: np.ndarray  # (m, r), orthonormal under the weights
    kernel_diag: np.ndarray  # (m,) k(t_i, t_i)
    discarded_mass: float  # trace - sum of retained eigenvalues
    tail_budget: float
    tail_diag_sup: float  # sup_i of the discarded pointwise variance
    model_hash: str

    @property
    def rank(self) -> int:
        return len(self.eigenvalues)

    @property
    def trace(self) -> float:
        return float(self.weights @ self.kernel_diag)


@dataclass(frozen=True)
class SamplePath:
    values: np.ndarray
    grid: PointSet
    stream: int
    model_hash: str


def build_spectral_model(spec: KernelSpec, grid: PointSet, tail_budget: float) -> SpectralModel:
    """Nyström eigendecomposition on a uniform grid, truncated at the smallest
    rank whose discarded eigenvalue mass is within ``tail_budget`` of the trace."""
    if not 0.0 < tail_budget <= 0.05:
        raise InvalidParameterError("tail_budget must be in (0, 0.05]")
    m = len(grid)
    w = 1.0 / m
    K = gram_matrix(spec, grid)
    theta, U = np.linalg.eigh(w * K)
    theta = theta[::-1].copy()
    U = U[:, ::-1].copy()
    trace = float(w * np.trace(K))
    pos = np.clip(theta, 0.0, None)
    cum = np.cumsum(pos)
    ok = np.nonzero(trace - cum <= tail_budget * trace)[0]
    if len(ok) == 0:
        raise TruncationUnreachableError(
            f"tail budget {tail_budget:g} unreachable: full spectrum leaves "
            f"{trace - cum[-1]:.3e} of {trace:.3e}"
        )
    r = int(ok[0]) + 1
    rank_tol = RANK_TOL_REL * max(theta[0], 0.0)
    while r > 1 and theta[r - 1] <= rank_tol:
        r -= 1
    lam = theta[:r].copy()
    if np.any(lam <= rank_tol):
        raise TruncationUnreachableError("tail budget requires eigenvalues at round-off scale")
    basis = U[:, :r] * np.sqrt(m)  # weighted-orthonormal: (1/m) phi^T phi = I
    kdiag = spec.diag(grid.points)
    discarded = max(trace - float(lam.sum()), 0.0)
    tail_diag = kdiag - (basis * basis) @ lam
    tail_diag_sup = float(np.clip(tail_diag, 0.0, None).max())
    h = hashlib.sha256()
    for arr in (grid.points, lam, basis):
        h.update(np.ascontiguousarray(arr).tobytes())
    return SpectralModel(
        grid=grid,
        weights=np.full(m, w),
        eigenvalues=lam,
        basis=basis,
        kernel_diag=kdiag,
        discarded_mass=discarded,
        tail_budget=tail_budget,
        tail_diag_sup=tail_diag_sup,
        model_hash=h.hexdigest()[:16],
    )


def path_matrix(model: SpectralModel, xi: np.ndarray) -> np.ndarray:
    """Paths for given standard-normal coefficient rows: (k, r) -> (k, m)."""
    return (xi * np.sqrt(model.eigenvalues)) @ model.basis.T


def sample_path(model: SpectralModel, stream) -> SamplePath:
    """One path from a counter-based stream (int key or Generator)."""
    if isinstance(stream, (int, np.integer)):
        rng = np.random.Generator(np.random.Philox(key=int(stream)))
        key = int(stream)
    else:
        rng = stream
        key = -1
    xi = rng.standard_normal(model.rank)
    values = path_matrix(model, xi[None, :])[0]
    return SamplePath(values=values, grid=model.grid, stream=key, model_hash=model.model_hash)


def _min_spacing(grid: PointSet) -> float:
    """Smallest positive per-axis spacing (grids here are uniform tensors)."""
    best = np.inf
    for j in range(grid.d):
        u = np.unique(grid.points[:, j])
        if len(u) > 1:
            best = min(best, float(np.diff(u).min()))
    if not np.isfinite(best):
        raise InvalidParameterError("degenerate grid")
    return best


def snap_to_grid(grid: PointSet, pts: np.ndarray) -> np.ndarray:
    """Indices of the grid nodes nearest to pts; error beyond half a spacing."""
    diff = pts[:, None, :] - grid.points[None, :, :]
    d2 = np.sum(diff * diff, axis=-1)
    idx = np.argmin(d2, axis=1)
    tol = 0.5 * _min_spacing(grid)
    if np.any(np.sqrt(d2[np.arange(len(pts)), idx]) > tol):
        raise DomainError("design point farther than half a grid spacing from every node")
    return idx


def sup_error(path: SamplePath, state: DesignState) -> float:
    """Max over the grid of |path - conditional expectation of the path|.

    The conditional path interpolates the path's values at the design points
    (snapped to grid nodes); with an empty design it is identically 0."""
    if state.n == 0:
        return float(np.abs(path.values).max())
    idx = snap_to_grid(path.grid, state.selected.points)
    obs = path.values[idx]
    cond = state.mean_field(obs, path.grid.points)
    return float(np.abs(path.values - cond).max())
