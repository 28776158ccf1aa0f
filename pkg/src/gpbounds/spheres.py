"""Gaussian random fields on a product of spheres S^d1 x S^d2 (d in {1, 2}),
expanded in product harmonics with polynomially decaying coefficient variances

    B_j = C (1 + |j|)^(-2 alpha - d1 - d2),   |j| = j1 + j2.

The L2 truncation error of such a field needs no pointwise harmonic
evaluation: by orthonormality it is exactly

    || X - X^[n] ||_2 = sqrt( sum_{|j| > n} B_j sum_m r_{j,m}^2 ).

`sphere_bound` gives the closed-form concentration radius for that error,
derived by reducing the block structure to a polynomial decay with block
sizes d_n <= c_{d1} c_{d2} (1+n)^(d1+d2-1) (c_1 = c_2 = 2).

Pointwise evaluation exists only for circle harmonics (`circle_mode_matrix`)
to support a grid-discretized operator-norm cross-check on the torus.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import zeta

from . import streams
from .bounds import BoundResult, bound_polynomial_multi
from .errors import InvalidParameterError, JmaxTooSmallError

DEFAULT_TAIL_BUDGET = 1.0e-8


def sphere_harmonic_dim(j: int, d: int) -> int:
    """Dimension of the degree-j harmonic space on S^d."""
    if j < 0 or d < 1:
        raise InvalidParameterError("need j >= 0 and d >= 1")
    if j == 0:
        return 1
    if d == 1:
        return 2
    return (2 * j + d - 1) * math.factorial(j + d - 2) // (math.factorial(j) * math.factorial(d - 1))


def dim_envelope_constant(d: int) -> float:
    """Smallest c_d with sphere_harmonic_dim(j, d) <= c_d (1+j)^(d-1) (d <= 2)."""
    if d not in (1, 2):
        raise InvalidParameterError("only d in {1, 2} supported")
    return 2.0


def product_block_dim(n: int, d1: int, d2: int) -> int:
    """Total dimension at product degree n: sum_l D_{n-l}(d1) D_l(d2)."""
    if n < 0:
        raise InvalidParameterError("n must be >= 0")
    return sum(sphere_harmonic_dim(n - l, d1) * sphere_harmonic_dim(l, d2) for l in range(n + 1))


@dataclass(frozen=True)
class ProductSphereSpec:
    """Coefficient law on S^d1 x S^d2 truncated at total degree J_max.

    tail_budget caps the relative spectral mass discarded by the truncation
    (an analytic upper envelope of the tail is used, so passing the check
    guarantees the true discarded mass is within budget)."""

    d1: int
    d2: int
    C: float
    alpha: float
    J_max: int
    tail_budget: float = DEFAULT_TAIL_BUDGET

    def __post_init__(self):
        if self.d1 not in (1, 2) or self.d2 not in (1, 2):
            raise InvalidParameterError("sphere dimensions must be 1 or 2")
        if self.C <= 0 or self.alpha <= 0:
            raise InvalidParameterError("need C > 0 and alpha > 0")
        if self.J_max < 1:
            raise InvalidParameterError("J_max must be >= 1")
        if not 0 < self.tail_budget <= 0.05:
            raise InvalidParameterError("tail_budget must be in (0, 0.05]")

        degrees = np.arange(self.J_max + 1)
        dims = np.array([product_block_dim(int(n), self.d1, self.d2) for n in degrees])
        B = self.C * (1.0 + degrees) ** (-(2.0 * self.alpha + self.d1 + self.d2))
        kept = float(np.sum(B * dims))
        cc = dim_envelope_constant(self.d1) * dim_envelope_constant(self.d2)
        discarded_upper = cc * self.C * float(zeta(2.0 * self.alpha + 1.0, self.J_max + 2))
        rel = discarded_upper / (kept + discarded_upper)
        if rel > self.tail_budget:
            raise JmaxTooSmallError(
                f"J_max={self.J_max} leaves relative tail mass <= {rel:.3e} "
                f"> budget {self.tail_budget:g}")

        # flat coefficient layout: blocks (j1, j2) sorted by (j1+j2, j1),
        # so each total degree occupies one contiguous segment
        block_dims = []
        for n in degrees:
            for j1 in range(int(n) + 1):
                block_dims.append(
                    sphere_harmonic_dim(j1, self.d1) * sphere_harmonic_dim(int(n) - j1, self.d2))
        offsets = np.concatenate([[0], np.cumsum(dims)])
        object.__setattr__(self, "degree_dims", dims)
        object.__setattr__(self, "block_dims", np.array(block_dims))
        object.__setattr__(self, "degree_offsets", offsets[:-1])
        object.__setattr__(self, "total_dim", int(offsets[-1]))
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "discarded_rel_upper", rel)

    def degree_sumsq(self, coeff_rows: np.ndarray) -> np.ndarray:
        """Per-degree sums of squared coefficients; rows are flat coefficient
        vectors (one field per row)."""
        rows = np.atleast_2d(coeff_rows)
        if rows.shape[1] != self.total_dim:
            raise InvalidParameterError("coefficient vector length mismatch")
        return np.add.reduceat(rows**2, self.degree_offsets, axis=1)


@dataclass(frozen=True)
class SphericalField:
    spec: ProductSphereSpec
    coeffs: np.ndarray
    degree_sq: np.ndarray


def build_field(spec: ProductSphereSpec, stream) -> SphericalField:
    """Draw all coefficients of one field; deterministic per stream."""
    if isinstance(stream, (int, np.integer)):
        stream = np.random.Generator(np.random.Philox(key=int(stream)))
    coeffs = stream.standard_normal(spec.total_dim)
    return SphericalField(spec=spec, coeffs=coeffs, degree_sq=spec.degree_sumsq(coeffs)[0])


def l2_truncation_error(field: SphericalField, n: int) -> float:
    """Exact L2 norm of X - X^[n] (n = -1 gives the full field norm)."""
    spec = field.spec
    if n > spec.J_max:
        raise InvalidParameterError("n must be <= J_max")
    if n < -1:
        raise InvalidParameterError("n must be >= -1")
    return float(np.sqrt(np.dot(spec.B[n + 1:], field.degree_sq[n + 1:])))


def _errors_chunk(payload, start: int, stop: int) -> np.ndarray:
    spec, ns, seed = payload
    gen = streams.generator(seed, streams.LANE_SPHERES, start // streams.CHUNK)
    rows = gen.standard_normal((stop - start, spec.total_dim))
    T = spec.degree_sumsq(rows)
    out = np.empty((stop - start, len(ns)))
    for k, n in enumerate(ns):
        out[:, k] = np.sqrt(T[:, n + 1:] @ spec.B[n + 1:])
    return out


def mc_truncation_errors(spec: ProductSphereSpec, ns, M: int, seed: int, *,
                         workers: int = 1) -> np.ndarray:
    """(M, len(ns)) matrix of truncation errors over M independent fields,
    byte-identical for any worker count."""
    ns = [int(n) for n in ns]
    if any(n < -1 or n > spec.J_max for n in ns):
        raise InvalidParameterError("each n must lie in [-1, J_max]")
    parts = streams.parallel_chunked(_errors_chunk, (spec, ns, int(seed)), M, workers)
    return np.vstack(parts)


def sphere_bound(spec: ProductSphereSpec, n: int, tau: float) -> BoundResult:
    """Concentration radius for the L2 truncation error at degree n.

    Computed through the block-polynomial reduction with
    alpha' = 2 alpha + d1 + d2, beta = d1 + d2 - 1, C_d = c_{d1} c_{d2},
    which simplifies to a constant times n^(-alpha)."""
    cc = dim_envelope_constant(spec.d1) * dim_envelope_constant(spec.d2)
    inner = bound_polynomial_multi(
        spec.C, cc, 2.0 * spec.alpha + spec.d1 + spec.d2, spec.d1 + spec.d2 - 1.0, n, tau)
    return BoundResult(
        radius=inner.radius, n=n, tau=tau, valid=True, source="sphere-product-closed-form",
        diagnostics={"c_d1": dim_envelope_constant(spec.d1),
                     "c_d2": dim_envelope_constant(spec.d2),
                     "reduced_alpha": 2.0 * spec.alpha + spec.d1 + spec.d2,
                     "reduced_beta": spec.d1 + spec.d2 - 1.0},
    )


# ---------------------------------------------------------------------------
# pointwise circle harmonics: only for the torus operator-norm cross-check


def circle_mode_matrix(m: int, J: int) -> np.ndarray:
    """(m, 2J+1) matrix of orthonormal circle harmonics 1, sqrt(2)cos(j t),
    sqrt(2)sin(j t) on the uniform m-point grid, w.r.t. the normalized arc
    measure (grid weight 1/m).  Exactly orthonormal when 2J < m."""
    if not 0 < 2 * J < m:
        raise InvalidParameterError("need 0 < 2J < m for exact discrete orthonormality")
    t = 2.0 * np.pi * np.arange(m) / m
    cols = [np.ones(m)]
    for j in range(1, J + 1):
        cols.append(np.sqrt(2.0) * np.cos(j * t))
        cols.append(np.sqrt(2.0) * np.sin(j * t))
    return np.column_stack(cols)


def torus_mode_matrix(spec: ProductSphereSpec, m: int) -> np.ndarray:
    """(m^2, total_dim) product-harmonic matrix on the m x m torus grid, with
    columns ordered like the flat coefficient layout (d1 = d2 = 1 only)."""
    if spec.d1 != 1 or spec.d2 != 1:
        raise InvalidParameterError("torus grid evaluation needs d1 = d2 = 1")
    base = circle_mode_matrix(m, spec.J_max)

    def factor_block(j):
        # columns of the degree-j harmonic space on one circle
        return base[:, :1] if j == 0 else base[:, 2 * j - 1: 2 * j + 1]

    cols = []
    for n in range(spec.J_max + 1):
        for j1 in range(n + 1):
            A, Bb = factor_block(j1), factor_block(n - j1)
            # all products A[:, a] x Bb[:, b] on the product grid
            prod = np.einsum("xa,yb->xyab", A, Bb).reshape(m * m, -1)
            cols.append(prod)
    out = np.hstack(cols)
    if out.shape[1] != spec.total_dim:
        raise InvalidParameterError("mode layout mismatch")
    return out


def torus_truncation_opnorm(spec: ProductSphereSpec, n: int, m: int, *,
                            method: str = "gram") -> float:
    """Operator norm of the grid-discretized covariance minus its degree-n
    truncation on the m x m torus.

    method="gram" works in mode space: the nonzero eigenvalues of
    sqrt(W) K_tail sqrt(W) equal those of B^(1/2) Phi^T W Phi B^(1/2).
    method="dense" assembles the full m^2 x m^2 kernel (small grids only)."""
    if not -1 <= n <= spec.J_max:
        raise InvalidParameterError("n must lie in [-1, J_max]")
    Phi = torus_mode_matrix(spec, m)
    w = 1.0 / (m * m)
    mode_B = np.repeat(spec.B, spec.degree_dims)
    tail = np.repeat(np.arange(spec.J_max + 1) > n, spec.degree_dims)
    if method == "gram":
        A = Phi[:, tail] * np.sqrt(w * mode_B[tail])
        return float(np.linalg.eigvalsh(A.T @ A).max()) if A.shape[1] else 0.0
    if method == "dense":
        K = (Phi[:, tail] * mode_B[tail]) @ Phi[:, tail].T
        return float(np.linalg.eigvalsh(w * K).max()) if tail.any() else 0.0
    raise InvalidParameterError("method must be 'gram' or 'dense'")
