"""Pure-NumPy implementation of the hot kernels.

Mirrors the compiled extension ``_corex``; one of the two is selected at
import time by ``gpbounds._core``.  Keep the two implementations numerically
twin-like: the test suite asserts ~1e-13 agreement between them.

Contents
--------
``bessel_k(nu, x)``
    Modified Bessel function of the second kind K_nu on positive arrays.
    Small arguments (x <= 2) use the Temme power series around the nearest
    integer order; larger arguments use the Steed/Thompson-Barnett continued
    fraction, followed by upward recurrence in the order.  Double precision,
    relative error ~1e-14 over the ranges this package touches.
``matern_profile(nu, r)``
    Normalized radial profile 2^(1-nu)/Gamma(nu) * r^nu * K_nu(r) with the
    exact limit 1 at r = 0.
``newton_greedy(K, n_max, tol)``
    Power-function greedy selection with an incrementally grown Newton basis.
"""

from __future__ import annotations

import math

import numpy as np

BACKEND_NAME = "pure"

_EPS = 1.0e-16
_MAXIT_SERIES = 200
_MAXIT_CF = 4000

# Taylor coefficients of 1/Gamma(1+z) = 1 + g1 z + g2 z^2 + g3 z^3 + ...
_G1 = 0.5772156649015329
_G2 = -0.6558780715202538
_G3 = -0.04200263503409524


def _gam12(mu: float):
    """gam1 = (1/Gamma(1-mu) - 1/Gamma(1+mu)) / (2 mu) and the even twin
    gam2 = (1/Gamma(1-mu) + 1/Gamma(1+mu)) / 2, stable through mu = 0."""
    if abs(mu) >= 1.0e-4:
        gp = 1.0 / math.gamma(1.0 + mu)
        gm = 1.0 / math.gamma(1.0 - mu)
        return (gm - gp) / (2.0 * mu), (gm + gp) / 2.0
    # series: the odd part of 1/Gamma(1+z) gives gam1 directly; truncation
    # error at |mu| < 1e-4 is ~g5 mu^4 < 1e-17
    gam1 = -(_G1 + _G3 * mu * mu)
    gam2 = 1.0 + _G2 * mu * mu
    return gam1, gam2


def _k_series(mu: float, x: np.ndarray):
    """Temme series for (K_mu(x), K_{mu+1}(x)), valid for 0 < x <= 2, |mu| <= 1/2."""
    x2 = 0.5 * x
    d = -np.log(x2)
    e = mu * d
    pimu = math.pi * mu
    fact = pimu / math.sin(pimu) if pimu != 0.0 else 1.0
    gam1, gam2 = _gam12(mu)
    gampl = gam2 - mu * gam1  # 1/Gamma(1+mu)
    gammi = gam2 + mu * gam1  # 1/Gamma(1-mu)
    fact2 = np.where(np.abs(e) > 1.0e-8, np.sinh(e) / np.where(e == 0.0, 1.0, e), 1.0 + e * e / 6.0)
    ff = fact * (gam1 * np.cosh(e) + gam2 * fact2 * d)
    summ = ff.copy()
    ee = np.exp(e)
    p = 0.5 * ee / gampl
    q = 0.5 / (ee * gammi)
    c = np.ones_like(x)
    d2 = x2 * x2
    sum1 = p.copy()
    for i in range(1, _MAXIT_SERIES + 1):
        ff = (i * ff + p + q) / (i * i - mu * mu)
        c *= d2 / i
        p /= i - mu
        q /= i + mu
        dl = c * ff
        summ += dl
        sum1 += c * (p - i * ff)
        if np.all(np.abs(dl) <= _EPS * np.abs(summ)):
            break
    return summ, sum1 * (2.0 / x)


def _k_cf2(mu: float, x: np.ndarray):
    """Steed's continued fraction for (K_mu(x), K_{mu+1}(x)), x > 2."""
    b = 2.0 * (1.0 + x)
    d = 1.0 / b
    h = d.copy()
    delh = d.copy()
    q1 = np.zeros_like(x)
    q2 = np.ones_like(x)
    a1 = 0.25 - mu * mu
    q = np.full_like(x, a1)
    c = a1
    a = -a1
    s = 1.0 + q * delh
    for i in range(2, _MAXIT_CF + 1):
        a -= 2.0 * (i - 1)
        c = -a * c / i
        qnew = (q1 - b * q2) / a
        q1 = q2
        q2 = qnew
        q = q + c * qnew
        b = b + 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h += delh
        dels = q * delh
        s += dels
        if np.all(np.abs(dels) <= _EPS * np.abs(s)):
            break
    h = a1 * h
    rkmu = np.sqrt(math.pi / (2.0 * x)) * np.exp(-x) / s
    rk1 = rkmu * (mu + x + 0.5 - h) / x
    return rkmu, rk1


def bessel_k(nu: float, x: np.ndarray) -> np.ndarray:
    """K_nu(x) elementwise for x > 0 (float64).  K_{-nu} = K_nu."""
    nu = abs(float(nu))
    x = np.asarray(x, dtype=np.float64)
    if np.any(x <= 0.0):
        raise ValueError("bessel_k requires x > 0")
    nl = int(math.floor(nu + 0.5))
    mu = nu - nl  # in [-1/2, 1/2)
    rkmu = np.empty_like(x)
    rk1 = np.empty_like(x)
    small = x <= 2.0
    if np.any(small):
        rkmu[small], rk1[small] = _k_series(mu, x[small])
    if np.any(~small):
        rkmu[~small], rk1[~small] = _k_cf2(mu, x[~small])
    # upward recurrence K_{m+1} = 2 m / x * K_m + K_{m-1}
    xi2 = 2.0 / x
    for i in range(1, nl + 1):
        rktemp = (mu + i) * xi2 * rk1 + rkmu
        rkmu = rk1
        rk1 = rktemp
    return rkmu


def matern_profile(nu: float, r: np.ndarray) -> np.ndarray:
    """2^(1-nu)/Gamma(nu) * r^nu * K_nu(r), with the exact value 1 at r=0."""
    if nu <= 0.0:
        raise ValueError("matern_profile requires nu > 0")
    r = np.asarray(r, dtype=np.float64)
    out = np.ones_like(r)
    # below ~1e-50 the profile is 1 to far beyond double precision and the
    # direct product could overflow for large nu; everything else is computed
    # by the definition
    m = r > 1.0e-50
    if np.any(m):
        rm = r[m]
        coef = math.pow(2.0, 1.0 - nu) / math.gamma(nu)
        out[m] = coef * np.power(rm, nu) * bessel_k(nu, rm)
    return out


def newton_greedy(K: np.ndarray, n_max: int, tol: float = 1.0e-14):
    """Greedy max-variance selection on a candidate Gram matrix.

    K is the (m, m) kernel matrix of the candidate set.  Repeatedly picks the
    candidate with the largest remaining power (posterior variance), ties to
    the lowest index, and extends the Newton basis V one row per pick: the
    rows are the columns of the design Gram's Cholesky factor evaluated on
    all candidates, so ``V[:k, idx].T`` is that factor.

    Returns ``(idx, V, trace)`` where trace[j] is the max remaining power
    after j picks (trace[0] = max of the diagonal).  Stops early when the
    largest remaining power has sqrt below ``tol`` (numerically exhausted
    candidates).
    """
    K = np.ascontiguousarray(K, dtype=np.float64)
    m = K.shape[0]
    n_max = min(int(n_max), m)
    p = np.diagonal(K).copy()
    V = np.empty((n_max, m), dtype=np.float64)
    idx = np.empty(n_max, dtype=np.int64)
    trace = np.empty(n_max + 1, dtype=np.float64)
    trace[0] = p.max() if m else 0.0
    k = 0
    for step in range(n_max):
        i = int(np.argmax(p))
        pi = p[i]
        if pi < 0.0:
            pi = 0.0
        if math.sqrt(pi) < tol:
            break
        row = K[i].astype(np.float64, copy=True)
        if step:
            row -= V[:step].T @ V[:step, i]
        row /= math.sqrt(pi)
        row[i] = math.sqrt(pi)
        V[step] = row
        p -= row * row
        np.clip(p, 0.0, None, out=p)
        p[i] = 0.0
        idx[step] = i
        k = step + 1
        trace[k] = p.max()
    return idx[:k].copy(), V[:k].copy(), trace[: k + 1].copy()
