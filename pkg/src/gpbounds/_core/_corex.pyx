# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled twin of ``_purepy``: Bessel K_nu, the Matérn radial profile, and
the Newton-basis greedy selection loop.  Same algorithms, scalar C loops."""

import numpy as np

cimport numpy as cnp
from libc.math cimport cosh, exp, fabs, floor, log, sinh, sqrt, tgamma, pow as cpow, pi, sin

cnp.import_array()

BACKEND_NAME = "compiled"

cdef double _EPS = 1.0e-16
cdef int _MAXIT_SERIES = 200
cdef int _MAXIT_CF = 4000

cdef double _G1 = 0.5772156649015329
cdef double _G2 = -0.6558780715202538
cdef double _G3 = -0.04200263503409524


cdef inline void _gam12(double mu, double* gam1, double* gam2) nogil:
    cdef double gp, gm
    if fabs(mu) >= 1.0e-4:
        gp = 1.0 / tgamma(1.0 + mu)
        gm = 1.0 / tgamma(1.0 - mu)
        gam1[0] = (gm - gp) / (2.0 * mu)
        gam2[0] = (gm + gp) / 2.0
    else:
        gam1[0] = -(_G1 + _G3 * mu * mu)
        gam2[0] = 1.0 + _G2 * mu * mu


cdef int _k_scalar(double nu, double x, double* out) nogil:
    """K_nu(x) for x > 0; returns nonzero on convergence failure."""
    cdef int nl = <int>floor(nu + 0.5)
    cdef double mu = nu - nl
    cdef double rkmu, rk1, rktemp
    cdef double x2, d, e, pimu, fact, gam1, gam2, gampl, gammi, fact2, ff
    cdef double summ, ee, p, q, c, d2, sum1, dl
    cdef double b, delh, h, q1, q2, a1, qq, cc, a, s, qnew, dels
    cdef int i, ok

    if x <= 2.0:
        x2 = 0.5 * x
        d = -log(x2)
        e = mu * d
        pimu = pi * mu
        fact = pimu / sin(pimu) if pimu != 0.0 else 1.0
        _gam12(mu, &gam1, &gam2)
        gampl = gam2 - mu * gam1
        gammi = gam2 + mu * gam1
        fact2 = sinh(e) / e if fabs(e) > 1.0e-8 else 1.0 + e * e / 6.0
        ff = fact * (gam1 * cosh(e) + gam2 * fact2 * d)
        summ = ff
        ee = exp(e)
        p = 0.5 * ee / gampl
        q = 0.5 / (ee * gammi)
        c = 1.0
        d2 = x2 * x2
        sum1 = p
        ok = 0
        for i in range(1, _MAXIT_SERIES + 1):
            ff = (i * ff + p + q) / (i * i - mu * mu)
            c *= d2 / i
            p /= i - mu
            q /= i + mu
            dl = c * ff
            summ += dl
            sum1 += c * (p - i * ff)
            if fabs(dl) <= _EPS * fabs(summ):
                ok = 1
                break
        if not ok:
            return 1
        rkmu = summ
        rk1 = sum1 * (2.0 / x)
    else:
        b = 2.0 * (1.0 + x)
        d = 1.0 / b
        h = d
        delh = d
        q1 = 0.0
        q2 = 1.0
        a1 = 0.25 - mu * mu
        qq = a1
        cc = a1
        a = -a1
        s = 1.0 + qq * delh
        ok = 0
        for i in range(2, _MAXIT_CF + 1):
            a -= 2.0 * (i - 1)
            cc = -a * cc / i
            qnew = (q1 - b * q2) / a
            q1 = q2
            q2 = qnew
            qq += cc * qnew
            b += 2.0
            d = 1.0 / (b + a * d)
            delh = (b * d - 1.0) * delh
            h += delh
            dels = qq * delh
            s += dels
            if fabs(dels) <= _EPS * fabs(s):
                ok = 1
                break
        if not ok:
            return 1
        h = a1 * h
        rkmu = sqrt(pi / (2.0 * x)) * exp(-x) / s
        rk1 = rkmu * (mu + x + 0.5 - h) / x

    for i in range(1, nl + 1):
        rktemp = (mu + i) * (2.0 / x) * rk1 + rkmu
        rkmu = rk1
        rk1 = rktemp
    out[0] = rkmu
    return 0


def bessel_k(double nu, x):
    """K_nu(x) elementwise for x > 0 (float64).  K_{-nu} = K_nu."""
    nu = fabs(nu)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] xa = np.ascontiguousarray(x, dtype=np.float64).ravel()
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty_like(xa)
    cdef Py_ssize_t i, n = xa.shape[0]
    cdef int bad = 0
    for i in range(n):
        if xa[i] <= 0.0:
            raise ValueError("bessel_k requires x > 0")
    with nogil:
        for i in range(n):
            if _k_scalar(nu, xa[i], &out[i]):
                bad = 1
                break
    if bad:
        raise RuntimeError("bessel_k failed to converge")
    return out.reshape(np.shape(x))


def matern_profile(double nu, r):
    """2^(1-nu)/Gamma(nu) * r^nu * K_nu(r), with the exact value 1 at r=0."""
    if nu <= 0.0:
        raise ValueError("matern_profile requires nu > 0")
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ra = np.ascontiguousarray(r, dtype=np.float64).ravel()
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty_like(ra)
    cdef double coef = cpow(2.0, 1.0 - nu) / tgamma(nu)
    cdef Py_ssize_t i, n = ra.shape[0]
    cdef double kv
    cdef int bad = 0
    with nogil:
        for i in range(n):
            if ra[i] > 1.0e-50:
                if _k_scalar(nu, ra[i], &kv):
                    bad = 1
                    break
                out[i] = coef * cpow(ra[i], nu) * kv
            else:
                out[i] = 1.0
    if bad:
        raise RuntimeError("bessel_k failed to converge")
    return out.reshape(np.shape(r))


def newton_greedy(K, int n_max, double tol=1.0e-14):
    """Greedy max-variance selection; see the pure twin for the contract."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] Ka = np.ascontiguousarray(K, dtype=np.float64)
    cdef Py_ssize_t m = Ka.shape[0]
    if n_max > m:
        n_max = m
    cdef cnp.ndarray[cnp.float64_t, ndim=1] p = np.diagonal(Ka).copy()
    cdef cnp.ndarray[cnp.float64_t, ndim=2] V = np.empty((n_max, m), dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] idx = np.empty(n_max, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] trace = np.empty(n_max + 1, dtype=np.float64)
    cdef Py_ssize_t step, i, j, t, k = 0
    cdef double pi_, s, r, mx

    mx = 0.0
    for j in range(m):
        if p[j] > mx:
            mx = p[j]
    trace[0] = mx

    with nogil:
        for step in range(n_max):
            i = 0
            pi_ = p[0]
            for j in range(1, m):
                if p[j] > pi_:
                    pi_ = p[j]
                    i = j
            if pi_ < 0.0:
                pi_ = 0.0
            if sqrt(pi_) < tol:
                break
            pi_ = sqrt(pi_)
            for j in range(m):
                s = Ka[i, j]
                for t in range(step):
                    s -= V[t, i] * V[t, j]
                V[step, j] = s / pi_
            V[step, i] = pi_
            mx = 0.0
            for j in range(m):
                r = p[j] - V[step, j] * V[step, j]
                if r < 0.0:
                    r = 0.0
                p[j] = r
            p[i] = 0.0
            for j in range(m):
                if p[j] > mx:
                    mx = p[j]
            idx[step] = i
            k = step + 1
            trace[k] = mx
    return idx[:k].copy(), np.asarray(V)[:k].copy(), np.asarray(trace)[: k + 1].copy()
