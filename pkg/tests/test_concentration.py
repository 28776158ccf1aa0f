import math

import numpy as np
import pytest

from gpbounds.concentration import (
    WeightSeq,
    centered_chisq_log_mgf,
    chisq_tail_bound,
    massart_tail_radius,
    mc_violation_rate,
    sample_many,
    sample_weighted_chisq,
    sub_gamma_log_mgf_bound,
)
from gpbounds.errors import InvalidParameterError, TruncationUnreachableError


# ---------------------------------------------------------------- norms

def test_geometric_norms_closed_form():
    b = WeightSeq.geometric(0.5, scale=3.0)
    assert b.l1 == pytest.approx(3.0 * 0.5 / 0.5, rel=1e-14)          # 3
    assert b.l2 == pytest.approx(3.0 * 0.5 / math.sqrt(0.75), rel=1e-14)
    assert b.sup == pytest.approx(1.5, rel=1e-14)


def test_polynomial_norms_bracketed_by_partial_sums():
    # independent oracle: partial sum + integral remainder brackets the series
    p = 1.5
    b = WeightSeq.polynomial(p)
    N = 200_000
    j = np.arange(1, N + 1, dtype=np.float64)
    for s, val in ((p, b.l1), (2 * p, b.l2**2)):
        partial = float(np.sum(j**-s))
        lo = partial + (N + 1.0) ** (1.0 - s) / (s - 1.0)
        hi = partial + float(N) ** (1.0 - s) / (s - 1.0)
        assert lo <= val <= hi


def test_norm_ordering_random_explicit():
    rng = np.random.default_rng(11)
    for _ in range(50):
        v = rng.uniform(0.0, 2.0, size=rng.integers(1, 30))
        b = WeightSeq.explicit(v)
        assert b.sup <= b.l2 + 1e-12 <= b.l1 + 1e-12


def test_values_upto():
    g = WeightSeq.geometric(0.5, scale=2.0)
    np.testing.assert_allclose(g.values_upto(4),
                               [0.0, 1.0, 0.5, 0.25, 0.125], rtol=1e-15)
    e = WeightSeq.explicit([3.0, 1.0, 2.0])
    np.testing.assert_array_equal(e.values_upto(5), [3, 1, 2, 0, 0, 0])
    np.testing.assert_array_equal(e.values_upto(1), [3, 1])
    p = WeightSeq.polynomial(2.0)
    assert p.values_upto(3).tolist() == [0.0, 1.0, 0.25, 1.0 / 9.0]


def test_tail_l2sq_geometric_exact():
    b = WeightSeq.geometric(0.7, scale=1.3)
    for J in (0, 1, 5, 20):
        j = np.arange(J + 1, J + 4000, dtype=np.float64)
        brute = float(np.sum((1.3 * 0.7**j) ** 2))
        assert b.tail_l2sq(J) == pytest.approx(brute, rel=1e-12)


def test_tail_l2sq_explicit_cutoff():
    b = WeightSeq.explicit([1.0, 2.0, 3.0])
    assert b.tail_l2sq(0) == 13.0
    assert b.tail_l2sq(1) == 9.0
    assert b.tail_l2sq(2) == 0.0
    assert b.tail_l2sq(99) == 0.0


def test_truncation_index_is_minimal():
    tol = 1e-6
    for b in (WeightSeq.geometric(0.5), WeightSeq.polynomial(2.0),
              WeightSeq.explicit([0.3, 0.2, 0.1])):
        J = b.truncation_index(tol)
        assert math.sqrt(2.0 * b.tail_l2sq(J)) < tol
        if J > 0:
            assert math.sqrt(2.0 * b.tail_l2sq(J - 1)) >= tol


def test_truncation_unreachable_for_barely_summable_tail():
    b = WeightSeq.polynomial(1.0000001)
    with pytest.raises(TruncationUnreachableError):
        b.truncation_index(1e-6)


# ---------------------------------------------------------------- radii

def test_radius_single_weight():
    # b = (1): radius 2*sqrt(tau) + 2*tau; at tau=1 this is exactly 4
    b = WeightSeq.explicit([1.0])
    assert chisq_tail_bound(b, 1.0) == pytest.approx(4.0, abs=1e-15)
    assert chisq_tail_bound(b, 4.0) == pytest.approx(12.0, abs=1e-14)


def test_radius_geometric_half():
    b = WeightSeq.geometric(0.5)
    assert chisq_tail_bound(b, 1.0) == pytest.approx(2.0 / math.sqrt(3.0) + 1.0,
                                                     rel=1e-14)


def test_massart_consistency():
    for b in (WeightSeq.geometric(0.5), WeightSeq.polynomial(1.5),
              WeightSeq.explicit([2.0, 1.0, 0.5])):
        for tau in (0.5, 1.0, 3.0):
            r = massart_tail_radius(2.0 * b.l2**2, 2.0 * b.sup, tau)
            assert r == pytest.approx(chisq_tail_bound(b, tau), rel=1e-12)


def test_log_mgf_values_and_envelope():
    # at s=0 both vanish; spot value at s=1/4: -1/4 + ln(2)/2 vs 1/8
    assert centered_chisq_log_mgf(0.0) == 0.0
    assert sub_gamma_log_mgf_bound(0.0) == 0.0
    assert centered_chisq_log_mgf(0.25) == pytest.approx(
        -0.25 + 0.5 * math.log(2.0), rel=1e-15)
    assert sub_gamma_log_mgf_bound(0.25) == pytest.approx(0.125, rel=1e-15)
    s = np.linspace(-3.0, 0.49, 500)
    g = centered_chisq_log_mgf(s)
    assert np.all(g >= -1e-14)  # Jensen, on both sides of 0
    pos = s[s >= 0]
    assert np.all(centered_chisq_log_mgf(pos) <= sub_gamma_log_mgf_bound(pos) + 1e-14)
    with pytest.raises(InvalidParameterError):
        centered_chisq_log_mgf(0.5)
    with pytest.raises(InvalidParameterError):
        sub_gamma_log_mgf_bound([0.2, 0.6])


def test_radius_monotone_in_tau():
    b = WeightSeq.polynomial(2.0)
    taus = np.linspace(0.1, 5.0, 40)
    r = [chisq_tail_bound(b, t) for t in taus]
    assert np.all(np.diff(r) > 0)


# ---------------------------------------------------------------- sampling

def test_sample_moments():
    b = WeightSeq.geometric(0.5)
    z = sample_many(b, 20_000, 77)
    assert abs(z.mean()) < 0.03
    assert abs(z.var() - 2.0 * b.l2**2) < 0.06


def test_sample_many_deterministic_and_worker_invariant():
    b = WeightSeq.polynomial(2.0)
    z1 = sample_many(b, 2000, 123)
    z2 = sample_many(b, 2000, 123)
    z4 = sample_many(b, 2000, 123, workers=4)
    assert np.array_equal(z1, z2)
    assert np.array_equal(z1, z4)
    assert not np.array_equal(z1, sample_many(b, 2000, 124))


def test_single_draw_matches_explicit_formula():
    b = WeightSeq.explicit([0.5, 0.25])
    key = 42
    z = sample_weighted_chisq(b, key)
    r = np.random.Generator(np.random.Philox(key=key)).standard_normal(2)
    assert z == pytest.approx(float(np.array([0.5, 0.25]) @ (r**2 - 1.0)), abs=0)


def test_violation_rate_within_guarantee():
    # seeded loop over the families: empirical rate must respect e^(-tau)
    for i, b in enumerate((WeightSeq.geometric(0.5), WeightSeq.polynomial(2.0),
                           WeightSeq.explicit([1.0, 0.3, 0.1]))):
        for tau in (1.0, 2.0):
            rate, half = mc_violation_rate(b, tau, 5000, 900 + i)
            assert rate <= math.exp(-tau) + half


def test_violation_rate_zero_weights():
    # degenerate case: Z = 0 and radius = 0; strict inequality counts nothing
    b = WeightSeq.explicit([0.0, 0.0])
    rate, half = mc_violation_rate(b, 1.0, 1000, 5)
    assert rate == 0.0 and half == 0.0


def test_violation_rate_reuses_samples():
    b = WeightSeq.geometric(0.5)
    z = sample_many(b, 2000, 8)
    r1, _ = mc_violation_rate(b, 1.0, 2000, 8)
    r2, _ = mc_violation_rate(b, 1.0, 2000, 999, samples=z)
    assert r1 == r2


# ---------------------------------------------------------------- validation

def test_parameter_validation():
    with pytest.raises(InvalidParameterError):
        WeightSeq.geometric(1.0)
    with pytest.raises(InvalidParameterError):
        WeightSeq.geometric(0.0)
    with pytest.raises(InvalidParameterError):
        WeightSeq.polynomial(1.0)
    with pytest.raises(InvalidParameterError):
        WeightSeq.explicit([])
    with pytest.raises(InvalidParameterError):
        WeightSeq.explicit([1.0, -0.1])
    with pytest.raises(InvalidParameterError):
        WeightSeq.explicit([np.nan])
    with pytest.raises(InvalidParameterError):
        WeightSeq(kind="cauchy")
    with pytest.raises(InvalidParameterError):
        chisq_tail_bound(WeightSeq.geometric(0.5), 0.0)
    with pytest.raises(InvalidParameterError):
        massart_tail_radius(0.0, 1.0, 1.0)
    with pytest.raises(InvalidParameterError):
        WeightSeq.geometric(0.5).truncation_index(0.0)
    with pytest.raises(InvalidParameterError):
        WeightSeq.geometric(0.5).values_upto(-1)
    with pytest.raises(InvalidParameterError):
        mc_violation_rate(WeightSeq.geometric(0.5), 1.0, 500, 1)
