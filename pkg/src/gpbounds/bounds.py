"""Concentration-bound radii for sup-norm deviation of conditioned Gaussian
random variables.

Two numeric bounds work for any admissible decay sequence:

``bound_general(c, d, a, n, tau)``
    radius = sqrt(5 max(1,tau) * S1 * S2) with
    S1 = sum_{j>n} a_j (c_{j-1} - c_j),  S2 = sum_{j>n} d_j / a_j,
    for variance envelopes c (nonincreasing, a_j c_j -> 0), block sizes d
    (positive integers) and any nondecreasing weight sequence a.
``bound_simple(c, n, tau)``
    radius = sqrt(5 max(1,tau)) * sum_{j>n} sqrt(c_{j-1} - c_j), requiring the
    differences themselves to be nonincreasing (c convex).

Both sums run until an analytic remainder (first tail term plus the integral
of a decreasing envelope) is below a relative tolerance; the remainder is
*added* to the sum so the returned radius stays an upper bound, and is
reported in diagnostics.

Closed forms (each provably dominates the matching numeric bound):

- polynomial decay c_j = C (j+1)^(-alpha):
    sqrt(20 C alpha max(1,tau)) / (alpha-1) * n^((1-alpha)/2)
- polynomial decay with block sizes d_j <= C_d (j+1)^beta:
    sqrt(20 alpha 2^beta C C_d max(1,tau)) / (alpha-beta-1) * n^((beta+1-alpha)/2)
- exponential decay c_j = C1 exp(-C2 j^(1/alpha)): for alpha = 1 the exact
  geometric sum; for alpha > 1 an incomplete-gamma upper bound with validity
  window n > (11(alpha-1)/C2)^alpha + 1 (outside the window the radius falls
  back to numeric quadrature of the tail integral and is flagged valid=False).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .errors import (
    HypothesisViolationError,
    InvalidParameterError,
    NonsummableTailError,
)

SUM_RTOL = 1.0e-12
MAX_TERMS = 10**7
SOFT_TERMS = 1 << 16  # settle for the envelope remainder past this many terms


# --------------------------------------------------------------------------
# decay specs (closed-form parameter carriers)


@dataclass(frozen=True)
class PolynomialDecay:
    """c_j = C (j+1)^(-alpha), alpha > 1."""

    C: float
    alpha: float

    def __post_init__(self):
        if self.C <= 0 or self.alpha <= 1:
            raise InvalidParameterError("polynomial decay needs C > 0, alpha > 1")


@dataclass(frozen=True)
class PolynomialMultiDecay:
    """c_j = C (j+1)^(-alpha) with block sizes d_j <= C_d (j+1)^beta, alpha > 1 + beta."""

    C: float
    alpha: float
    C_d: float
    beta: float

    def __post_init__(self):
        if self.C <= 0 or self.C_d <= 0 or self.beta < 0:
            raise InvalidParameterError("need C > 0, C_d > 0, beta >= 0")
        if self.alpha <= 1 + self.beta:
            raise InvalidParameterError("need alpha > 1 + beta")


@dataclass(frozen=True)
class ExponentialDecay:
    """c_j = C1 exp(-C2 j^(1/alpha)), alpha >= 1."""

    C1: float
    C2: float
    alpha: float = 1.0

    def __post_init__(self):
        if self.C1 <= 0 or self.C2 <= 0:
            raise InvalidParameterError("need C1, C2 > 0")
        if self.alpha < 1:
            raise InvalidParameterError("need alpha >= 1")


# --------------------------------------------------------------------------
# sequence specs: exact terms + continuous tail envelopes + growth rates
#
# tail_rate() returns (p, ec, ep) meaning the sequence behaves like
# t^p * exp(ec * t^ep) up to constants; the rate algebra below decides
# summability of products before any numeric work starts.


def _rate_mul(r1, r2):
    p = r1[0] + r2[0]
    exps = {}
    for _, ec, ep in (r1, r2):
        if ec != 0.0:
            exps[ep] = exps.get(ep, 0.0) + ec
    return p, exps


def _rate_summable(p, exps) -> bool:
    for ep in sorted(exps, reverse=True):
        if exps[ep] > 0:
            return False
        if exps[ep] < 0:
            return True
    return p < -1.0


class SequenceSpec:
    """A nonnegative sequence j >= 0 with vectorized evaluation and enough
    analytic structure to bound its tails."""

    def value(self, j) -> np.ndarray:
        raise NotImplementedError

    def tail_rate(self):
        raise NotImplementedError


class PolySeq(SequenceSpec):
    """C (j+1)^(-alpha); decreasing convex for alpha > 0."""

    def __init__(self, C: float, alpha: float):
        if C <= 0 or alpha <= 0:
            raise InvalidParameterError("PolySeq needs C > 0, alpha > 0")
        self.C, self.alpha = float(C), float(alpha)

    def value(self, j):
        return self.C * np.power(np.asarray(j, dtype=np.float64) + 1.0, -self.alpha)

    def neg_deriv(self, t):
        return self.C * self.alpha * np.power(np.asarray(t, dtype=np.float64) + 1.0, -self.alpha - 1.0)

    def tail_rate(self):
        return (-self.alpha, 0.0, 1.0)

    def diff_rate(self):
        return (-self.alpha - 1.0, 0.0, 1.0)


class ExpSeq(SequenceSpec):
    """C1 exp(-C2 (j - origin)^(1/alpha)); decreasing convex for j >= origin.

    ``origin`` shifts the index so long measured prefixes can be continued
    without exp-overflow in the amplitude; shifted form requires alpha = 1
    (for alpha > 1 the derivative is singular at the origin)."""

    def __init__(self, C1: float, C2: float, alpha: float = 1.0, origin: int = 0):
        if C1 <= 0 or C2 <= 0 or alpha < 1:
            raise InvalidParameterError("ExpSeq needs C1, C2 > 0, alpha >= 1")
        if origin != 0 and alpha != 1.0:
            raise InvalidParameterError("shifted ExpSeq requires alpha = 1")
        self.C1, self.C2, self.alpha = float(C1), float(C2), float(alpha)
        self.origin = int(origin)

    def value(self, j):
        j = np.clip(np.asarray(j, dtype=np.float64) - self.origin, 0.0, None)
        return self.C1 * np.exp(-self.C2 * np.power(j, 1.0 / self.alpha))

    def neg_deriv(self, t):
        t = np.maximum(np.asarray(t, dtype=np.float64) - self.origin, 1.0e-300)
        u = 1.0 / self.alpha
        return self.C1 * self.C2 * u * np.power(t, u - 1.0) * np.exp(-self.C2 * np.power(t, u))

    def tail_rate(self):
        return (0.0, -self.C2, 1.0 / self.alpha)

    def diff_rate(self):
        return (1.0 / self.alpha - 1.0, -self.C2, 1.0 / self.alpha)


class PowerGrowth(SequenceSpec):
    """a_j = j^gamma (j >= 1), nondecreasing for gamma >= 0."""

    def __init__(self, gamma: float):
        if gamma < 0:
            raise InvalidParameterError("PowerGrowth needs gamma >= 0")
        self.gamma = float(gamma)

    def value(self, j):
        return np.power(np.asarray(j, dtype=np.float64), self.gamma)

    def tail_rate(self):
        return (self.gamma, 0.0, 1.0)


class GeometricGrowth(SequenceSpec):
    """a_j = base^j, base > 1."""

    def __init__(self, base: float):
        if base <= 1.0:
            raise InvalidParameterError("GeometricGrowth needs base > 1")
        self.base = float(base)

    def value(self, j):
        return np.power(self.base, np.asarray(j, dtype=np.float64))

    def tail_rate(self):
        return (0.0, math.log(self.base), 1.0)


class ConstSeq(SequenceSpec):
    """Constant positive integer sequence (block sizes)."""

    def __init__(self, v: int = 1):
        if int(v) != v or v < 1:
            raise InvalidParameterError("block sizes must be positive integers")
        self.v = int(v)

    def value(self, j):
        return np.full(np.shape(j), float(self.v))

    def upper_cont(self, t):
        return np.full(np.shape(t), float(self.v))

    def tail_rate(self):
        return (0.0, 0.0, 1.0)


class IntPolyCounts(SequenceSpec):
    """d_j = max(1, floor(C_d (j+1)^beta)): integer block sizes under a
    polynomial envelope."""

    def __init__(self, C_d: float, beta: float):
        if C_d <= 0 or beta < 0:
            raise InvalidParameterError("need C_d > 0, beta >= 0")
        self.C_d, self.beta = float(C_d), float(beta)

    def value(self, j):
        raw = np.floor(self.C_d * np.power(np.asarray(j, dtype=np.float64) + 1.0, self.beta))
        return np.maximum(raw, 1.0)

    def upper_cont(self, t):
        env = self.C_d * np.power(np.asarray(t, dtype=np.float64) + 1.0, self.beta)
        return np.maximum(env, 1.0)

    def tail_rate(self):
        return (self.beta, 0.0, 1.0)


class MeasuredSeq(SequenceSpec):
    """Finite measured prefix c_0..c_N continued by an anchored decay model.

    The prefix must be positive, nonincreasing, with nonincreasing
    differences, and the model must continue it monotonically across the seam
    (value and first difference both no larger than the last ones of the
    prefix).  Intended use: the harness convexifies a measured trace together
    with sampled model values so these conditions hold by construction."""

    SLACK = 1.0e-12

    def __init__(self, values, tail: SequenceSpec):
        v = np.asarray(values, dtype=np.float64)
        if v.ndim != 1 or len(v) < 2:
            raise InvalidParameterError("need at least c_0, c_1")
        if v.min() <= 0:
            raise InvalidParameterError("measured values must be positive")
        d = -np.diff(v)
        slack = self.SLACK * v[0]
        if d.min() < -slack:
            raise HypothesisViolationError("measured values must be nonincreasing")
        if np.any(np.diff(d) > slack):
            raise HypothesisViolationError("measured differences must be nonincreasing")
        N = len(v) - 1
        t1 = float(np.asarray(tail.value(N + 1)))
        t2 = float(np.asarray(tail.value(N + 2)))
        if t1 > v[N] + slack:
            raise HypothesisViolationError("tail model exceeds the last measured value")
        seam = v[N] - t1
        if len(d) and seam > d[-1] + slack:
            raise HypothesisViolationError("seam difference larger than the last measured one")
        if t1 - t2 > seam + slack:
            raise HypothesisViolationError("tail model differences rise across the seam")
        self.values = v
        self.N = N
        self.tail = tail

    def value(self, j):
        j = np.asarray(j)
        out = np.empty(j.shape, dtype=np.float64)
        pre = j <= self.N
        out[pre] = self.values[j[pre].astype(np.int64)]
        out[~pre] = self.tail.value(j[~pre])
        return out

    def neg_deriv(self, t):
        # only queried beyond the prefix (env_start in the summers)
        return self.tail.neg_deriv(t)

    def tail_rate(self):
        return self.tail.tail_rate()

    def diff_rate(self):
        return self.tail.diff_rate()

    def env_start(self) -> int:
        return self.N + 1


# --------------------------------------------------------------------------
# numeric tail summation with analytic remainders


def _sum_tail(term_vec, env, start: int, *, env_start: int = 0, rtol: float = SUM_RTOL,
              max_terms: int = MAX_TERMS, what: str = "tail"):
    """sum_{j >= start} term(j) for nonnegative terms dominated, from
    env_start on, by the decreasing continuous envelope env(t).

    Returns (upper, partial, remainder, last_j): upper = partial + remainder
    includes the analytic bound on everything beyond last_j.  rtol is a
    tightness target, not a promise — slowly decaying tails (polynomial)
    cannot reach it by summation, so once a valid envelope remainder exists
    the function returns it after SOFT_TERMS terms; the result is an upper
    bound either way, just a looser one."""
    total = 0.0
    J = start - 1
    block = 64
    best = None
    while True:
        js = np.arange(J + 1, J + 1 + block, dtype=np.int64)
        vals = np.asarray(term_vec(js), dtype=np.float64)
        if not np.all(np.isfinite(vals)):
            raise NonsummableTailError(f"{what}: non-finite term")
        total += float(vals.sum())
        J = int(js[-1])
        block = min(block * 2, 1 << 16)
        if J + 1 >= env_start:
            e1 = float(env(J + 1.0))
            e2 = float(env(J + 2.0))
            if np.isfinite(e1) and e2 <= e1 * (1.0 + 1e-12):
                res = quad(env, J + 1.0, np.inf, limit=200, full_output=1)
                # add quad's own error estimate so the remainder stays an
                # upper bound
                rem = e1 + float(res[0]) + abs(float(res[1]))
                if np.isfinite(rem) and rem >= 0.0:
                    best = (total + rem, total, rem, J)
                    if rem <= rtol * (total + rem) or rem < 1.0e-300:
                        return best
        n_terms = J - start + 1
        if best is not None and n_terms >= SOFT_TERMS:
            return best
        if n_terms >= max_terms:
            if best is not None:
                return best
            raise NonsummableTailError(
                f"{what}: no decreasing tail envelope within {max_terms} terms")


def _check_rate_summable(rate, what: str):
    p, exps = rate
    if not _rate_summable(p, exps):
        raise NonsummableTailError(f"{what} diverges under the supplied decay models")


# --------------------------------------------------------------------------
# results


@dataclass(frozen=True)
class BoundResult:
    """A concentration radius: deviation exceeds ``radius`` with probability
    at most e^(-tau), provided the hypotheses behind ``source`` hold."""

    radius: float
    n: int
    tau: float
    valid: bool
    source: str
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.tau <= 0:
            raise InvalidParameterError("tau must be > 0")
        if not self.radius >= 0:
            raise InvalidParameterError("radius must be >= 0")

    @property
    def confidence(self) -> float:
        return 1.0 - math.exp(-self.tau)


def _tau_factor(tau: float) -> float:
    if tau <= 0:
        raise InvalidParameterError("tau must be > 0")
    return max(1.0, tau)


# --------------------------------------------------------------------------
# numeric theorem bounds


def _require_counts(d: SequenceSpec):
    probe = np.asarray(d.value(np.arange(1, 17)))
    if np.any(probe < 1) or np.any(np.abs(probe - np.round(probe)) > 1e-9):
        raise InvalidParameterError("block sizes must be positive integers")


def bound_general(c: SequenceSpec, d: SequenceSpec, a: SequenceSpec, n: int, tau: float) -> BoundResult:
    """Weighted two-series tail bound; works for any admissible (c, d, a)."""
    if n < 0:
        raise InvalidParameterError("n must be >= 0")
    _require_counts(d)

    diff_rate = c.diff_rate()
    _check_rate_summable(_rate_mul(a.tail_rate(), diff_rate), "S1 = sum a_j (c_{j-1} - c_j)")
    p_a, ec_a, ep_a = a.tail_rate()
    inv_a = (-p_a, -ec_a, ep_a)
    _check_rate_summable(_rate_mul(d.tail_rate(), inv_a), "S2 = sum d_j / a_j")
    # S1 < inf together with c_j -> 0 already forces a_j c_j -> 0 (the
    # summation-by-parts condition): a_n c_n <= sum_{j>n} a_j (c_{j-1}-c_j).

    env_start = c.env_start() if isinstance(c, MeasuredSeq) else 0

    def s1_terms(js):
        vals = c.value(js - 1) - c.value(js)
        if np.any(vals < -1e-15 * float(np.max(np.abs(c.value(js - 1))))):
            raise HypothesisViolationError("c must be nonincreasing")
        return a.value(js) * np.clip(vals, 0.0, None)

    def s1_env(t):
        return a.value(np.asarray(t)) * c.neg_deriv(np.asarray(t) - 1.0)

    d_env = d.upper_cont if hasattr(d, "upper_cont") else d.value

    def s2_terms(js):
        return d.value(js) / a.value(js)

    def s2_env(t):
        return d_env(np.asarray(t)) / a.value(np.asarray(t))

    S1, p1, r1, J1 = _sum_tail(s1_terms, s1_env, n + 1, env_start=env_start, what="S1")
    S2, p2, r2, J2 = _sum_tail(s2_terms, s2_env, n + 1, what="S2")

    # spot check a_j c_j -> 0 on the evaluated range
    ac_head = float((a.value(np.asarray([n + 1])) * c.value(np.asarray([n + 1])))[0])
    ac_tail = float((a.value(np.asarray([J1])) * c.value(np.asarray([J1])))[0])
    if ac_tail > max(ac_head, 1e-300) * 1.0001 and J1 > n + 1:
        raise HypothesisViolationError("a_j c_j is not decaying on the evaluated range")

    radius = math.sqrt(5.0 * _tau_factor(tau) * S1 * S2)
    return BoundResult(
        radius=radius, n=n, tau=tau, valid=True, source="tail-weighted-general",
        diagnostics={
            "S1": S1, "S2": S2, "S1_remainder": r1, "S2_remainder": r2,
            "checked_up_to": max(J1, J2),
        },
    )


def bound_simple(c: SequenceSpec, n: int, tau: float) -> BoundResult:
    """Square-root-of-differences tail bound (needs convex c)."""
    if n < 0:
        raise InvalidParameterError("n must be >= 0")
    # sqrt of the diff rate
    pd, ecd, epd = c.diff_rate()
    _check_rate_summable((pd / 2.0, {epd: ecd / 2.0} if ecd else {}), "sum sqrt(c_{j-1}-c_j)")

    env_start = c.env_start() if isinstance(c, MeasuredSeq) else 0

    def terms(js):
        vals = c.value(js - 1) - c.value(js)
        lim = -1e-15 * float(np.max(c.value(js - 1))) - 1e-300
        if np.any(vals < lim):
            raise HypothesisViolationError("c must be nonincreasing")
        vals = np.clip(vals, 0.0, None)
        if not isinstance(c, MeasuredSeq) and np.any(np.diff(vals) > 1e-12 * (vals[0] + 1e-300)):
            raise HypothesisViolationError("differences c_{j-1} - c_j must be nonincreasing")
        return np.sqrt(vals)

    def env(t):
        return np.sqrt(c.neg_deriv(np.asarray(t) - 1.0))

    S, partial, rem, J = _sum_tail(terms, env, n + 1, env_start=env_start, what="sqrt-diff tail")
    radius = math.sqrt(5.0 * _tau_factor(tau)) * S
    return BoundResult(
        radius=radius, n=n, tau=tau, valid=True, source="tail-sqrt-simple",
        diagnostics={"tail_sum": S, "remainder": rem, "checked_up_to": J},
    )


# --------------------------------------------------------------------------
# closed forms


def bound_polynomial(C: float, alpha: float, n: int, tau: float) -> BoundResult:
    """Closed form for c_j = C (j+1)^(-alpha), one functional per step."""
    PolynomialDecay(C, alpha)
    if n < 1:
        raise InvalidParameterError("n must be >= 1")
    radius = math.sqrt(20.0 * C * alpha * _tau_factor(tau)) / (alpha - 1.0) * n ** ((1.0 - alpha) / 2.0)
    return BoundResult(radius=radius, n=n, tau=tau, valid=True, source="polynomial-closed-form")


def bound_polynomial_multi(C: float, C_d: float, alpha: float, beta: float, n: int, tau: float) -> BoundResult:
    """Closed form for c_j = C (j+1)^(-alpha) with d_j <= C_d (j+1)^beta."""
    PolynomialMultiDecay(C, alpha, C_d, beta)
    if n < 1:
        raise InvalidParameterError("n must be >= 1")
    radius = (
        math.sqrt(20.0 * alpha * 2.0**beta * C * C_d * _tau_factor(tau))
        / (alpha - beta - 1.0)
        * n ** ((beta + 1.0 - alpha) / 2.0)
    )
    return BoundResult(radius=radius, n=n, tau=tau, valid=True, source="polynomial-block-closed-form")


def exponential_window_start(C2: float, alpha: float) -> float:
    """The closed exponential form is valid for n strictly beyond this."""
    return (11.0 * (alpha - 1.0) / C2) ** alpha + 1.0


def _tail_integral(decay: ExponentialDecay, n: int):
    """Upper bound on sum_{j>n} sqrt(c_{j-1}-c_j): closed incomplete-gamma
    form inside the validity window, quadrature of the derivative envelope
    outside it.  Returns (value, method)."""
    C1, C2, d = decay.C1, decay.C2, decay.alpha
    if n < 1:
        raise InvalidParameterError("n must be >= 1")
    if n > exponential_window_start(C2, d):
        val = (
            1.1 * math.sqrt(C1 * C2 * d)
            * (C2 / 2.0) ** (d - 2.0)
            * (n - 1.0) ** ((d - 1.0) / (2.0 * d))
            * math.exp(-(C2 / 2.0) * (n - 1.0) ** (1.0 / d))
        )
        return val, "closed-form"

    seq = ExpSeq(C1, C2, d)

    def integrand(t):
        return math.sqrt(float(seq.neg_deriv(t)))

    res = quad(integrand, max(n - 1.0, 0.0), np.inf, limit=400, full_output=1)
    return float(res[0]) + abs(float(res[1])), "quadrature"


def tail_integral_bound(decay: ExponentialDecay, n: int) -> float:
    """Integral upper bound on the sqrt-difference tail of an exponential decay."""
    return _tail_integral(decay, n)[0]


def bound_exponential(C1: float, C2: float, alpha: float, n: int, tau: float) -> BoundResult:
    """Closed form for c_j = C1 exp(-C2 j^(1/alpha)).

    alpha = 1: the geometric tail sum is computed exactly, valid for all n.
    alpha > 1: incomplete-gamma closed form inside its validity window;
    outside it the numeric tail integral is returned with valid=False."""
    decay = ExponentialDecay(C1, C2, alpha)
    if n < 0:
        raise InvalidParameterError("n must be >= 0")
    tf = _tau_factor(tau)
    if alpha == 1.0:
        geo = math.sqrt(C1 * (-math.expm1(-C2))) * math.exp(-C2 * n / 2.0) / (-math.expm1(-C2 / 2.0))
        return BoundResult(
            radius=math.sqrt(5.0 * tf) * geo, n=n, tau=tau, valid=True,
            source="exponential-closed-form", diagnostics={"method": "exact-geometric"},
        )
    val, method = _tail_integral(decay, max(n, 1))
    in_window = n > exponential_window_start(C2, alpha)
    return BoundResult(
        radius=math.sqrt(5.0 * tf) * val, n=n, tau=tau, valid=in_window,
        source="exponential-closed-form",
        diagnostics={"method": method, "window_start": exponential_window_start(C2, alpha)},
    )


def default_weight_growth(alpha: float, beta: float = 0.0) -> PowerGrowth:
    """The compromise weight growth a_j = j^((alpha+beta+1)/2) used to derive
    the polynomial closed forms from the general bound."""
    return PowerGrowth((alpha + beta + 1.0) / 2.0)
