import math

import numpy as np
import pytest

from gpbounds.bounds import bound_polynomial_multi
from gpbounds.errors import InvalidParameterError, JmaxTooSmallError
from gpbounds.spheres import (
    ProductSphereSpec,
    build_field,
    circle_mode_matrix,
    dim_envelope_constant,
    l2_truncation_error,
    mc_truncation_errors,
    product_block_dim,
    sphere_bound,
    sphere_harmonic_dim,
    torus_mode_matrix,
    torus_truncation_opnorm,
)
from gpbounds.streams import LANE_SPHERES, stream_key


# ------------------------------------------------------------ dimensions

def test_harmonic_dims_circle():
    assert sphere_harmonic_dim(0, 1) == 1
    assert all(sphere_harmonic_dim(j, 1) == 2 for j in range(1, 20))


def test_harmonic_dims_two_sphere():
    # D_j(S^2) = 2j + 1
    assert [sphere_harmonic_dim(j, 2) for j in range(6)] == [1, 3, 5, 7, 9, 11]


def test_harmonic_dim_validation():
    with pytest.raises(InvalidParameterError):
        sphere_harmonic_dim(-1, 1)
    with pytest.raises(InvalidParameterError):
        sphere_harmonic_dim(0, 0)


def test_product_block_dims():
    assert product_block_dim(0, 1, 1) == 1
    assert product_block_dim(2, 1, 1) == 8
    assert product_block_dim(1, 2, 1) == 5
    # circle x circle: 4n modes at degree n >= 1
    assert [product_block_dim(n, 1, 1) for n in range(1, 8)] == [4 * n for n in range(1, 8)]


def test_dim_envelope():
    for d in (1, 2):
        c = dim_envelope_constant(d)
        assert c == 2.0
        for j in range(50):
            assert sphere_harmonic_dim(j, d) <= c * (1 + j) ** (d - 1)
    # tight on the circle at every j >= 1, asymptotically tight on S^2
    assert sphere_harmonic_dim(1, 1) == 2
    assert sphere_harmonic_dim(40, 2) / (2.0 * 41.0) > 0.98
    with pytest.raises(InvalidParameterError):
        dim_envelope_constant(3)


# ------------------------------------------------------------ spec / layout

def make_spec(J=15, budget=0.05, alpha=1.0):
    return ProductSphereSpec(1, 1, 1.0, alpha, J, budget)


def test_layout_totals():
    spec = make_spec()
    assert spec.total_dim == 1 + 2 * 15 * 16  # 1 + sum 4n
    assert spec.degree_dims.sum() == spec.total_dim
    assert spec.block_dims.sum() == spec.total_dim
    np.testing.assert_array_equal(np.diff(spec.degree_offsets), spec.degree_dims[:-1])


def test_degree_sumsq_matches_block_loop():
    spec = make_spec(J=6)
    rng = np.random.default_rng(3)
    rows = rng.standard_normal((4, spec.total_dim))
    got = spec.degree_sumsq(rows)
    for n in range(7):
        a = spec.degree_offsets[n]
        bnd = a + spec.degree_dims[n]
        np.testing.assert_allclose(got[:, n], np.sum(rows[:, a:bnd] ** 2, axis=1),
                                   rtol=1e-14)


def test_spec_validation():
    with pytest.raises(InvalidParameterError):
        ProductSphereSpec(3, 1, 1.0, 1.0, 10)
    with pytest.raises(InvalidParameterError):
        ProductSphereSpec(1, 1, 0.0, 1.0, 10)
    with pytest.raises(InvalidParameterError):
        ProductSphereSpec(1, 1, 1.0, -1.0, 10)
    with pytest.raises(InvalidParameterError):
        ProductSphereSpec(1, 1, 1.0, 1.0, 0)
    with pytest.raises(InvalidParameterError):
        ProductSphereSpec(1, 1, 1.0, 1.0, 10, tail_budget=0.2)
    with pytest.raises(InvalidParameterError):
        ProductSphereSpec(1, 1, 1.0, 1.0, 10, tail_budget=0.0)


def test_jmax_too_small():
    with pytest.raises(JmaxTooSmallError):
        ProductSphereSpec(1, 1, 1.0, 1.0, 2, tail_budget=0.05)
    # the default budget is strict: even J_max = 15 is nowhere near enough
    with pytest.raises(JmaxTooSmallError):
        ProductSphereSpec(1, 1, 1.0, 1.0, 15)
    spec = make_spec()
    assert spec.discarded_rel_upper <= 0.05


# ------------------------------------------------------------ fields

def test_build_field_deterministic():
    spec = make_spec(J=6)
    key = stream_key(19, LANE_SPHERES, 2)
    f1 = build_field(spec, key)
    f2 = build_field(spec, key)
    assert np.array_equal(f1.coeffs, f2.coeffs)
    assert not np.array_equal(f1.coeffs, build_field(spec, key + 1).coeffs)


def test_truncation_error_edge_cases():
    spec = make_spec(J=6)
    f = build_field(spec, 1)
    assert l2_truncation_error(f, spec.J_max) == 0.0
    full = l2_truncation_error(f, -1)
    assert full > 0
    with pytest.raises(InvalidParameterError):
        l2_truncation_error(f, 7)
    with pytest.raises(InvalidParameterError):
        l2_truncation_error(f, -2)


def test_parseval_against_grid_norm():
    """The truncation error must equal the discrete L2 norm of the discarded
    part of the field evaluated on a torus grid fine enough for exact
    orthonormality."""
    spec = make_spec(J=6)
    m = 16  # 2 * J_max < m
    Phi = torus_mode_matrix(spec, m)
    mode_B = np.repeat(spec.B, spec.degree_dims)
    f = build_field(spec, 123)
    values_by_mode = np.sqrt(mode_B) * f.coeffs
    for n in (-1, 0, 2, 5):
        tail = np.repeat(np.arange(spec.J_max + 1) > n, spec.degree_dims)
        g = Phi[:, tail] @ values_by_mode[tail]
        grid_norm = math.sqrt(float(np.sum(g**2)) / (m * m))
        assert l2_truncation_error(f, n) == pytest.approx(grid_norm, rel=1e-12)


def test_mc_errors_shape_and_determinism():
    spec = make_spec(J=6)
    ns = [0, 2, 4]
    e1 = mc_truncation_errors(spec, ns, 1200, 31)
    e2 = mc_truncation_errors(spec, ns, 1200, 31)
    e4 = mc_truncation_errors(spec, ns, 1200, 31, workers=4)
    assert e1.shape == (1200, 3)
    assert np.array_equal(e1, e2)
    assert np.array_equal(e1, e4)
    # per field, the error shrinks as the truncation degree grows
    assert np.all(np.diff(e1, axis=1) <= 0)


def test_mc_errors_mean_square():
    spec = make_spec(J=6)
    e = mc_truncation_errors(spec, [-1], 3000, 7)[:, 0]
    exact = float(np.sum(spec.B * spec.degree_dims))
    assert abs(np.mean(e**2) - exact) < 0.1


def test_mc_errors_validation():
    spec = make_spec(J=6)
    with pytest.raises(InvalidParameterError):
        mc_truncation_errors(spec, [7], 1000, 1)


# ------------------------------------------------------------ bounds

def test_sphere_bound_reduction_identity():
    # hand-reduced parameters: C_d = c_1 * c_1 = 4, alpha' = 2a + 2, beta = 1
    spec = make_spec(alpha=1.0)
    for n in (1, 2, 4, 8, 16):
        for tau in (1.0, 2.0):
            got = sphere_bound(spec, n, tau)
            want = bound_polynomial_multi(1.0, 4.0, 4.0, 1.0, n, tau)
            assert got.radius == pytest.approx(want.radius, rel=1e-12)
            assert got.diagnostics["reduced_alpha"] == 4.0
            assert got.diagnostics["reduced_beta"] == 1.0


def test_sphere_bound_rate():
    # the reduced bound collapses to const * n^(-alpha)
    spec = make_spec(alpha=1.0)
    vals = [sphere_bound(spec, n, 1.0).radius * n for n in (2, 4, 8, 16)]
    assert max(vals) - min(vals) < 1e-12 * vals[0]
    assert vals[0] == pytest.approx(math.sqrt(160.0), rel=1e-12)


# ------------------------------------------------------------ torus modes

def test_circle_modes_orthonormal():
    Phi = circle_mode_matrix(32, 10)
    G = Phi.T @ Phi / 32.0
    assert np.max(np.abs(G - np.eye(21))) < 1e-13
    with pytest.raises(InvalidParameterError):
        circle_mode_matrix(16, 8)  # needs 2J < m


def test_torus_modes_orthonormal():
    spec = make_spec(J=6)
    m = 16
    Phi = torus_mode_matrix(spec, m)
    assert Phi.shape == (m * m, spec.total_dim)
    G = Phi.T @ Phi / (m * m)
    assert np.max(np.abs(G - np.eye(spec.total_dim))) < 1e-12


def test_torus_modes_need_circle_factors():
    with pytest.raises(InvalidParameterError):
        torus_mode_matrix(ProductSphereSpec(2, 1, 1.0, 1.0, 8, 0.05), 32)


def test_opnorm_identity():
    """With exactly orthonormal discrete modes the truncated-covariance
    operator norm is the largest discarded eigenvalue B_{n+1}."""
    spec = make_spec(J=15)
    for n in (-1, 0, 1, 4, 8):
        got = torus_truncation_opnorm(spec, n, 64)
        assert got == pytest.approx(spec.B[n + 1], rel=1e-8)
    assert torus_truncation_opnorm(spec, 15, 64) == 0.0


def test_opnorm_gram_matches_dense():
    spec = make_spec(J=7)
    for n in (0, 3):
        g = torus_truncation_opnorm(spec, n, 32, method="gram")
        d = torus_truncation_opnorm(spec, n, 32, method="dense")
        assert g == pytest.approx(d, rel=1e-10)
    with pytest.raises(InvalidParameterError):
        torus_truncation_opnorm(spec, 0, 32, method="qr")
    with pytest.raises(InvalidParameterError):
        torus_truncation_opnorm(spec, 9, 32)
