"""Weighted chi-squared series: tail bound and Monte-Carlo verification.

For nonnegative summable weights (b_j) and i.i.d. standard normals (r_j),

    Z = sum_j b_j (r_j^2 - 1)

satisfies  P(Z >= 2 ||b||_2 sqrt(tau) + 2 ||b||_inf tau) <= exp(-tau).

`WeightSeq` carries the weights plus exact l1/l2/sup norms (closed forms for
the geometric and polynomial families, finite sums otherwise), `chisq_tail_bound`
evaluates the radius, and `mc_violation_rate` measures the empirical exceedance
frequency over deterministic Philox streams.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import zeta

from . import streams
from .errors import InvalidParameterError, TruncationUnreachableError

DEFAULT_TRUNC_TOL = 1.0e-6
_NORM_ORDER_SLACK = 1.0e-12


@dataclass(frozen=True)
class WeightSeq:
    """Weight sequence b_j >= 0: either a finite explicit vector (indexed from
    j = 0) or one of two closed-form families indexed from j = 1:

    - geometric:  b_j = scale * ratio^j          (0 < ratio < 1)
    - polynomial: b_j = scale * j^(-power)       (power > 1, so the l1 norm is finite)

    Norms are exact (geometric sums / Riemann zeta), so the tail beyond any
    truncation is accounted for, not dropped.
    """

    kind: str
    scale: float = 1.0
    ratio: float = 0.0
    power: float = 0.0
    values: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @staticmethod
    def explicit(values) -> "WeightSeq":
        v = np.asarray(values, dtype=np.float64)
        if v.ndim != 1 or len(v) == 0:
            raise InvalidParameterError("explicit weights need a 1-d nonempty vector")
        if not np.all(np.isfinite(v)) or v.min() < 0:
            raise InvalidParameterError("weights must be finite and >= 0")
        return WeightSeq(kind="explicit", values=v)

    @staticmethod
    def geometric(ratio: float, scale: float = 1.0) -> "WeightSeq":
        if not 0.0 < ratio < 1.0:
            raise InvalidParameterError("geometric ratio must be in (0, 1)")
        if scale < 0:
            raise InvalidParameterError("scale must be >= 0")
        return WeightSeq(kind="geometric", scale=float(scale), ratio=float(ratio))

    @staticmethod
    def polynomial(power: float, scale: float = 1.0) -> "WeightSeq":
        if power <= 1.0:
            raise InvalidParameterError("polynomial weights need power > 1 for a finite l1 norm")
        if scale < 0:
            raise InvalidParameterError("scale must be >= 0")
        return WeightSeq(kind="polynomial", scale=float(scale), power=float(power))

    # ---- norms (exact, tails included) ----

    @property
    def l1(self) -> float:
        if self.kind == "explicit":
            return float(self.values.sum())
        if self.kind == "geometric":
            return self.scale * self.ratio / (1.0 - self.ratio)
        return self.scale * float(zeta(self.power, 1.0))

    @property
    def l2(self) -> float:
        if self.kind == "explicit":
            return float(np.sqrt(np.sum(self.values**2)))
        if self.kind == "geometric":
            return self.scale * self.ratio / math.sqrt(1.0 - self.ratio**2)
        return self.scale * math.sqrt(float(zeta(2.0 * self.power, 1.0)))

    @property
    def sup(self) -> float:
        if self.kind == "explicit":
            return float(self.values.max())
        if self.kind == "geometric":
            return self.scale * self.ratio
        return self.scale

    def __post_init__(self):
        if self.kind not in ("explicit", "geometric", "polynomial"):
            raise InvalidParameterError(f"unknown weight family {self.kind!r}")
        s = self.l2
        if not (self.sup <= s * (1 + _NORM_ORDER_SLACK) + _NORM_ORDER_SLACK
                and s <= self.l1 * (1 + _NORM_ORDER_SLACK) + _NORM_ORDER_SLACK):
            raise InvalidParameterError("norm ordering sup <= l2 <= l1 violated")

    # ---- evaluation / truncation ----

    def values_upto(self, J: int) -> np.ndarray:
        """b_0 .. b_J (the closed-form families have b_0 = 0)."""
        if J < 0:
            raise InvalidParameterError("J must be >= 0")
        if self.kind == "explicit":
            out = np.zeros(J + 1)
            k = min(J + 1, len(self.values))
            out[:k] = self.values[:k]
            return out
        j = np.arange(J + 1, dtype=np.float64)
        if self.kind == "geometric":
            out = self.scale * self.ratio**j
        else:
            with np.errstate(divide="ignore"):
                out = self.scale * np.where(j >= 1, j, 1.0) ** (-self.power)
        out[0] = 0.0
        return out

    def tail_l2sq(self, J: int) -> float:
        """sum_{j > J} b_j^2, exactly."""
        if self.kind == "explicit":
            if J + 1 >= len(self.values):
                return 0.0
            return float(np.sum(self.values[J + 1:] ** 2))
        K = max(J + 1, 1)
        if self.kind == "geometric":
            return self.scale**2 * self.ratio ** (2 * K) / (1.0 - self.ratio**2)
        return self.scale**2 * float(zeta(2.0 * self.power, K))

    def truncation_index(self, trunc_tol: float) -> int:
        """Smallest J with sqrt(2 sum_{j>J} b_j^2) < trunc_tol."""
        if trunc_tol <= 0:
            raise InvalidParameterError("trunc_tol must be > 0")
        target = 0.5 * trunc_tol**2

        def ok(J):
            return self.tail_l2sq(J) < target

        if ok(0):
            return 0
        hi = 1
        while not ok(hi):
            hi *= 2
            if hi > 2**30:
                raise TruncationUnreachableError(
                    f"weight tail never reaches trunc_tol={trunc_tol:g}")
        lo = hi // 2  # ok(lo) is False
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if ok(mid):
                hi = mid
            else:
                lo = mid
        return hi


def chisq_tail_bound(b: WeightSeq, tau: float) -> float:
    """Radius with exceedance probability at most e^(-tau)."""
    if tau <= 0:
        raise InvalidParameterError("tau must be > 0")
    return 2.0 * b.l2 * math.sqrt(tau) + 2.0 * b.sup * tau


def massart_tail_radius(v: float, c: float, tau: float) -> float:
    """Generic sub-gamma radius c*tau + sqrt(2*v*tau); with v = 2||b||_2^2 and
    c = 2||b||_inf it coincides with chisq_tail_bound."""
    if v <= 0 or c <= 0 or tau <= 0:
        raise InvalidParameterError("massart_tail_radius needs v, c, tau > 0")
    return c * tau + math.sqrt(2.0 * v * tau)


def centered_chisq_log_mgf(s):
    """log E exp(s (r^2 - 1)) = -s - ln(1-2s)/2 for a standard normal r; needs
    s < 1/2.  Nonnegative for s >= 0 (Jensen)."""
    s = np.asarray(s, dtype=np.float64)
    if np.any(s >= 0.5):
        raise InvalidParameterError("the mgf diverges for s >= 1/2")
    return -s - 0.5 * np.log1p(-2.0 * s)


def sub_gamma_log_mgf_bound(s):
    """s^2 / (1-2s): the envelope of centered_chisq_log_mgf on [0, 1/2) that
    the tail radius is optimized against."""
    s = np.asarray(s, dtype=np.float64)
    if np.any(s >= 0.5):
        raise InvalidParameterError("the envelope needs s < 1/2")
    return s * s / (1.0 - 2.0 * s)


def sample_weighted_chisq(b: WeightSeq, stream, trunc_tol: float = DEFAULT_TRUNC_TOL) -> float:
    """One draw of Z = sum b_j (r_j^2 - 1), truncated once the remaining
    standard deviation sqrt(2 sum_tail b_j^2) is below trunc_tol."""
    if isinstance(stream, (int, np.integer)):
        stream = np.random.Generator(np.random.Philox(key=int(stream)))
    J = b.truncation_index(trunc_tol)
    w = b.values_upto(J)
    r = stream.standard_normal(J + 1)
    return float(w @ (r**2 - 1.0))


def _chi2_chunk(payload, start: int, stop: int) -> np.ndarray:
    w, seed, _ = payload
    gen = streams.generator(seed, streams.LANE_CHI2, start // streams.CHUNK)
    r = gen.standard_normal((stop - start, len(w)))
    return (r**2 - 1.0) @ w


def sample_many(b: WeightSeq, M: int, seed: int, *, trunc_tol: float = DEFAULT_TRUNC_TOL,
                workers: int = 1) -> np.ndarray:
    """M deterministic draws of Z (byte-identical for any worker count)."""
    if M < 1:
        raise InvalidParameterError("M must be >= 1")
    J = b.truncation_index(trunc_tol)
    payload = (b.values_upto(J), int(seed), trunc_tol)
    parts = streams.parallel_chunked(_chi2_chunk, payload, M, workers)
    return np.concatenate(parts)


def mc_violation_rate(b: WeightSeq, tau: float, M: int, seed: int, *,
                      trunc_tol: float = DEFAULT_TRUNC_TOL, workers: int = 1,
                      samples: np.ndarray | None = None):
    """(rate, 3-sigma binomial half-width) of the event Z > radius over M draws.

    Strict inequality so that the degenerate all-zero weight case (Z = 0,
    radius = 0) counts no violations.  Pass precomputed ``samples`` to reuse
    one set of draws across several tau values.
    """
    if M < 1000:
        raise InvalidParameterError("M must be >= 1000 for a meaningful rate")
    z = sample_many(b, M, seed, trunc_tol=trunc_tol, workers=workers) if samples is None else samples
    if len(z) != M:
        raise InvalidParameterError("samples length must equal M")
    bound = chisq_tail_bound(b, tau)
    rate = float(np.count_nonzero(z > bound)) / M
    half = 3.0 * math.sqrt(rate * (1.0 - rate) / M)
    return rate, half
