"""Covariance kernels on [0,1]^d and Gram-matrix assembly."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _core
from .errors import DomainError, DuplicatePointError, InvalidParameterError

SEPARATION_TOL = 1.0e-10


def _as_points(arr) -> np.ndarray:
    a = np.asarray(arr, dtype=np.float64)
    if a.ndim == 1:
        a = a[:, None]
    if a.ndim != 2:
        raise InvalidParameterError("points must be an (n, d) array")
    return a


@dataclass(frozen=True)
class PointSet:
    """Ordered, pairwise-distinct points in [0,1]^d."""

    points: np.ndarray

    def __post_init__(self):
        pts = _as_points(self.points)
        object.__setattr__(self, "points", pts)
        if pts.size and (pts.min() < -1e-12 or pts.max() > 1.0 + 1e-12):
            raise DomainError("points must lie in [0,1]^d")

    @staticmethod
    def checked(arr) -> "PointSet":
        """Construct with the O(n^2) duplicate guard."""
        ps = PointSet(arr)
        n = len(ps)
        if n > 1:
            d2 = np.sum((ps.points[:, None, :] - ps.points[None, :, :]) ** 2, axis=-1)
            d2[np.arange(n), np.arange(n)] = np.inf
            if d2.min() < SEPARATION_TOL**2:
                raise DuplicatePointError("points closer than the separation tolerance")
        return ps

    @staticmethod
    def uniform_grid(per_axis: int, d: int = 1) -> "PointSet":
        """Tensor grid with endpoints, per_axis nodes per axis."""
        axes = [np.linspace(0.0, 1.0, per_axis)] * d
        mesh = np.meshgrid(*axes, indexing="ij")
        return PointSet(np.stack([m.ravel() for m in mesh], axis=-1))

    @staticmethod
    def midpoint_grid(per_axis: int, d: int = 1) -> "PointSet":
        """Tensor grid of cell midpoints (no endpoints)."""
        ax = (np.arange(per_axis) + 0.5) / per_axis
        mesh = np.meshgrid(*([ax] * d), indexing="ij")
        return PointSet(np.stack([m.ravel() for m in mesh], axis=-1))

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]


class KernelSpec:
    """Base class; subclasses implement the radial/tabulated evaluation."""

    d: int

    def diag(self, pts: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def cross(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        raise NotImplementedError


def _sqdist(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # (n,d),(m,d) -> (n,m); hypot-style expansion is fine at unit scale
    aa = np.sum(a * a, axis=1)[:, None]
    bb = np.sum(b * b, axis=1)[None, :]
    d2 = aa + bb - 2.0 * (a @ b.T)
    np.clip(d2, 0.0, None, out=d2)
    return d2


@dataclass(frozen=True)
class MaternKernel(KernelSpec):
    """Matérn kernel with smoothness s > d: profile 2^(1-nu)/Gamma(nu) r^nu K_nu(r),
    nu = s - d/2.  Normalized so k(t,t) = 1 exactly."""

    s: float
    d: int = 1

    def __post_init__(self):
        if self.d < 1:
            raise InvalidParameterError("d must be >= 1")
        if not self.s > self.d:
            raise InvalidParameterError("Matérn requires s > d")

    @property
    def nu(self) -> float:
        return self.s - self.d / 2.0

    def diag(self, pts):
        return np.ones(pts.shape[0])

    def cross(self, a, b):
        r = np.sqrt(_sqdist(a, b))
        return _core.matern_profile(self.nu, r)


@dataclass(frozen=True)
class GaussianKernel(KernelSpec):
    """k(t,s) = exp(-||t-s||^2)."""

    d: int = 1

    def __post_init__(self):
        if self.d < 1:
            raise InvalidParameterError("d must be >= 1")

    def diag(self, pts):
        return np.ones(pts.shape[0])

    def cross(self, a, b):
        return np.exp(-_sqdist(a, b))


@dataclass(frozen=True)
class TabulatedKernel(KernelSpec):
    """PSD kernel given by its value matrix on a fixed grid; evaluation only
    at (points snapped to) grid nodes."""

    grid: PointSet
    values: np.ndarray
    snap_tol: float = 1.0e-9
    d: int = field(init=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        m = len(self.grid)
        if vals.shape != (m, m):
            raise InvalidParameterError("values must be (m, m) for an m-node grid")
        if not np.allclose(vals, vals.T, atol=1e-12):
            raise InvalidParameterError("tabulated kernel must be symmetric")
        vals = 0.5 * (vals + vals.T)
        if m <= 1024:  # PSD sanity is O(m^3); skip for big tables
            w = np.linalg.eigvalsh(vals)
            if w.min() < -1e-8 * max(vals.trace(), 1e-300):
                raise InvalidParameterError("tabulated kernel is not PSD")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "d", self.grid.d)

    def _locate(self, pts: np.ndarray) -> np.ndarray:
        d2 = _sqdist(pts, self.grid.points)
        idx = np.argmin(d2, axis=1)
        # re-measure the winning distances by direct differencing: the
        # quadratic-expansion form above loses ~1e-16 absolute accuracy to
        # cancellation, which would swamp a snap tolerance this tight
        exact = ((pts - self.grid.points[idx]) ** 2).sum(axis=1)
        if np.any(exact > self.snap_tol**2):
            raise DomainError("point is not a node of the tabulated grid")
        return idx

    def diag(self, pts):
        idx = self._locate(pts)
        return self.values[idx, idx]

    def cross(self, a, b):
        ia = self._locate(a)
        ib = self._locate(b)
        return self.values[np.ix_(ia, ib)]


def _check_domain(spec: KernelSpec, pts: np.ndarray):
    if pts.shape[1] != spec.d:
        raise DomainError(f"expected dimension {spec.d}, got {pts.shape[1]}")
    if pts.size and (pts.min() < -1e-12 or pts.max() > 1.0 + 1e-12):
        raise DomainError("point outside [0,1]^d")


def eval_kernel(spec: KernelSpec, t, s) -> float:
    """k(t, s) for two points (a scalar or a length-d coordinate vector each)."""
    a = np.asarray(t, dtype=np.float64).reshape(1, -1)
    b = np.asarray(s, dtype=np.float64).reshape(1, -1)
    _check_domain(spec, a)
    _check_domain(spec, b)
    return float(spec.cross(a, b)[0, 0])


def gram_matrix(spec: KernelSpec, pts: PointSet) -> np.ndarray:
    """Symmetric Gram matrix K[i,j] = k(t_i, t_j); computed once, mirrored."""
    if len(pts) == 0:
        raise InvalidParameterError("gram_matrix needs a nonempty point set")
    _check_domain(spec, pts.points)
    K = spec.cross(pts.points, pts.points)
    K = np.triu(K) + np.triu(K, 1).T  # enforce exact symmetry
    np.fill_diagonal(K, spec.diag(pts.points))
    return K


def cross_gram(spec: KernelSpec, a: PointSet, b: PointSet) -> np.ndarray:
    """K[i,j] = k(a_i, b_j) (rectangular; internal plumbing)."""
    _check_domain(spec, a.points)
    _check_domain(spec, b.points)
    return spec.cross(a.points, b.points)
