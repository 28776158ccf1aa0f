"""Experiment drivers: wire kernels, conditioning, sampling, bounds,
concentration and spheres into the reproducible runs behind the CLI.

Each run_* function takes a validated config dict and returns a Report.
Monte-Carlo work goes through streams.parallel_chunked with chunk-keyed
Philox streams, so results are byte-identical for any worker count.

The gp-concentration driver builds the model-free bound from the measured
power trace in four steps:

1. floor the trace at round-off scale (1e-15 of c_0) and enforce monotonicity;
2. append an anchored tail model continuing from the last measured value
   (polynomial with the smoothness-determined rate for Matern kernels,
   exponential with the fitted rate for Gaussian ones);
3. take the convex majorant of the whole sequence (right-to-left pass
   enforcing nonincreasing differences), which repairs floor plateaus and
   seam kinks while staying an upper envelope;
4. feed the result to bound_simple as a MeasuredSeq whose analytic tail is
   summed to convergence with a bounded remainder.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.stats import chi2 as _chi2_dist

from . import streams
from .bounds import (
    BoundResult,
    ExpSeq,
    MeasuredSeq,
    PolySeq,
    bound_exponential,
    bound_polynomial,
    bound_polynomial_multi,
    bound_simple,
)
from .concentration import WeightSeq, chisq_tail_bound, mc_violation_rate, sample_many
from .conditioning import greedy_design
from .errors import ConfigError, FitFailureError
from .kernels import GaussianKernel, MaternKernel, PointSet
from .reporting import Report
from .sampling import build_spectral_model
from .spheres import (
    ProductSphereSpec,
    dim_envelope_constant,
    mc_truncation_errors,
    sphere_bound,
    torus_truncation_opnorm,
)

HULL_HORIZON = 256
NOISE_FLOOR_REL = 1.0e-15
FIT_MIN_R2 = 0.9


def kernel_from_config(k: dict):
    if k["family"] == "matern":
        return MaternKernel(s=k["s"], d=k["d"])
    return GaussianKernel(d=k["d"])


# ---------------------------------------------------------------------------
# power-trace fitting and the model-free bound sequence


def convex_majorant(values: np.ndarray) -> np.ndarray:
    """Smallest pointwise-dominating sequence with nonincreasing differences
    (input must be nonincreasing)."""
    v = np.asarray(values, dtype=np.float64).copy()
    for j in range(len(v) - 3, -1, -1):
        lift = 2.0 * v[j + 1] - v[j + 2]
        if lift > v[j]:
            v[j] = lift
    return v


def fit_trace(c: np.ndarray, model: str, fit_floor: float) -> dict:
    """Regress the decay model on the trust range: entries above
    fit_floor * c_0, starting after the initial plateau (the rate regression
    begins at the first index where the trace has halved — early steps mostly
    fight boundary effects and say nothing about the asymptotic rate).  The
    amplitude is an envelope (max ratio over *all* trusted entries, plateau
    included), not a mean, so the fitted model dominates the measured values
    pointwise on the trusted range."""
    c = np.asarray(c, dtype=np.float64)
    trusted = np.nonzero(c >= fit_floor * c[0])[0]
    halved = np.nonzero(c <= 0.5 * c[0])[0]
    lo = int(halved[0]) if len(halved) else 0
    idx = trusted[trusted >= lo]
    if len(idx) < 3:
        raise FitFailureError("fewer than 3 trace entries in the trust range")
    y = np.log(c[idx])
    x = np.log(idx + 1.0) if model == "polynomial" else idx.astype(np.float64)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot <= 0:
        raise FitFailureError("degenerate (constant) trace on the trust range")
    r2 = 1.0 - float(resid @ resid) / ss_tot
    out = {"model": model, "r2": r2, "trust_lo": int(idx[0]), "trust_hi": int(idx[-1])}
    if model == "polynomial":
        alpha = -float(slope)
        if alpha <= 0:
            raise FitFailureError("nonpositive fitted decay exponent")
        out.update(C=float(np.max(c[trusted] * (trusted + 1.0) ** alpha)), alpha=alpha)
    else:
        C2 = -float(slope)
        if C2 <= 0:
            raise FitFailureError("nonpositive fitted decay rate")
        out.update(C1=float(np.max(c[trusted] * np.exp(C2 * trusted))), C2=C2)
    return out


def model_free_sequence(c: np.ndarray, model: str, *, theory_rate: float | None = None,
                        fitted: dict | None = None, fit_floor: float = 1.0e-12):
    """(MeasuredSeq, tail-info dict) for the measured power trace c."""
    c = np.asarray(c, dtype=np.float64)
    floored = np.maximum(np.minimum.accumulate(c), NOISE_FLOOR_REL * c[0])
    N = len(floored) - 1
    anchor = float(floored[-1])
    if model == "polynomial":
        if theory_rate is None or theory_rate <= 1:
            raise ConfigError("polynomial tails need a decay rate > 1")
        rate, source = float(theory_rate), "kernel-smoothness"
        H = HULL_HORIZON
        js = np.arange(N + 1, N + H + 1, dtype=np.float64)
        samples = anchor * ((N + 1.0) / (js + 1.0)) ** rate
    else:
        if fitted is not None and fitted.get("r2", 0.0) >= FIT_MIN_R2:
            rate, source = float(fitted["C2"]), "fitted-decay-rate"
        else:
            # conservative fallback: the slowest decay seen between adjacent
            # trust-range entries
            idx = np.nonzero(floored >= fit_floor * floored[0])[0]
            ratios = np.log(floored[idx[:-1]] / floored[idx[1:]])
            pos = ratios[ratios > 0]
            rate = float(pos.min()) if len(pos) else 1.0e-3
            rate, source = max(rate, 1.0e-3), "trust-range-min-slope"
        H = min(HULL_HORIZON, max(8, int(600.0 / max(rate, 1.0e-3))))
        js = np.arange(1, H + 1, dtype=np.float64)
        samples = anchor * np.exp(-rate * js)
    hull = convex_majorant(np.concatenate([floored, samples]))
    E = len(hull) - 1
    end = float(hull[-1])
    if model == "polynomial":
        tail = PolySeq(end * (E + 1.0) ** rate, rate)
    else:
        tail = ExpSeq(end, rate, 1.0, origin=E)
    info = {"tail_model": model, "tail_rate": rate, "tail_rate_source": source,
            "anchor": anchor, "horizon": E - N}
    return MeasuredSeq(hull, tail), info


def _quantile_with_ci(sorted_vals: np.ndarray, q: float):
    """(value, lo, hi): order statistic at level q with a ~99% index band."""
    M = len(sorted_vals)
    k = min(max(int(math.ceil(q * M)), 1), M)
    dk = int(math.ceil(2.576 * math.sqrt(M * q * (1.0 - q)))) if 0 < q < 1 else 0
    lo = sorted_vals[max(k - dk, 1) - 1]
    hi = sorted_vals[min(k + dk, M) - 1]
    return float(sorted_vals[k - 1]), float(lo), float(hi)


def _null_3sigma(tau: float, M: int) -> float:
    p0 = math.exp(-tau)
    return 3.0 * math.sqrt(p0 * (1.0 - p0) / M)


# ---------------------------------------------------------------------------
# gp-concentration


def _gp_chunk(payload, start: int, stop: int) -> np.ndarray:
    P, idx, interp, ns, seed = payload
    gen = streams.generator(seed, streams.LANE_PATHS, start // streams.CHUNK)
    xi = gen.standard_normal((stop - start, P.shape[0]))
    paths = xi @ P
    out = np.empty((stop - start, len(ns)))
    for k, n in enumerate(ns):
        dev = paths if n == 0 else paths - paths[:, idx[:n]] @ interp[n]
        out[:, k] = np.max(np.abs(dev), axis=1)
    return out


GP_COLUMNS = ["kernel", "j", "c", "model", "C", "alpha", "C1", "C2", "r2",
              "trust_lo", "trust_hi", "fit_ok", "tail_model", "tail_rate",
              "tail_rate_source", "n_requested", "n", "saturated", "tau", "M",
              "bound", "bound_source", "bound_valid", "bound_fitted",
              "bound_fitted_source", "bound_fitted_valid", "rate", "rate_ci3",
              "rate_fitted", "quantile", "quantile_lo", "quantile_hi"]


def run_gp_concentration(cfg: dict, workers: int = 1) -> Report:
    spec = kernel_from_config(cfg["kernel"])
    d = cfg["kernel"]["d"]
    grid = PointSet.uniform_grid(cfg["grid_size"], d)
    res = greedy_design(spec, grid, len(grid), allow_partial=True)
    c = res.trace.values
    achieved = len(res.indices)
    kernel_label = (f"matern(s={cfg['kernel']['s']:g},d={d})"
                    if cfg["kernel"]["family"] == "matern" else f"gaussian(d={d})")

    report = Report(kind=cfg["kind"], config=cfg, seed=cfg["seed"], columns=GP_COLUMNS)
    for j, cj in enumerate(c):
        report.add_row("trace", kernel=kernel_label, j=j, c=float(cj))

    model = cfg["decay_model"]
    try:
        fitted = fit_trace(c, model, cfg["fit_floor"])
        report.add_row("fit", kernel=kernel_label, fit_ok=True, **fitted)
    except FitFailureError as e:
        fitted = None
        report.add_row("fit", kernel=kernel_label, fit_ok=False, model=model)
        report.add_check("decay-model-fit", False, str(e))

    theory_rate = 2.0 * cfg["kernel"].get("s", 0.0) / d - 1.0 if model == "polynomial" else None
    seq, tail_info = model_free_sequence(
        c, model, theory_rate=theory_rate, fitted=fitted, fit_floor=cfg["fit_floor"])
    report.add_row("tail", kernel=kernel_label, tail_model=tail_info["tail_model"],
                   tail_rate=tail_info["tail_rate"],
                   tail_rate_source=tail_info["tail_rate_source"])

    schedule = [(int(n_req), min(int(n_req), achieved)) for n_req in cfg["n_schedule"]]
    unique_ns = sorted({n for _, n in schedule})
    taus = cfg["taus"]
    M = cfg["M"]

    errs = None
    if M > 0:
        sm = build_spectral_model(spec, grid, cfg["tail_budget"])
        P = np.sqrt(sm.eigenvalues)[:, None] * sm.basis.T
        interp = {n: res.interpolation_matrix(spec, grid, n) for n in unique_ns if n >= 1}
        parts = streams.parallel_chunked(
            _gp_chunk, (P, res.indices, interp, unique_ns, cfg["seed"]), M, workers)
        errs = np.vstack(parts)
        report.summary["spectral_rank"] = sm.rank
        report.summary["spectral_discarded_mass"] = sm.discarded_mass

    def fitted_bound(n, tau):
        if fitted is None:
            return None
        try:
            if model == "polynomial":
                return bound_polynomial(fitted["C"], fitted["alpha"], n, tau)
            return bound_exponential(fitted["C1"], fitted["C2"], 1.0, n, tau)
        except Exception:
            return None

    bounds_cache = {}
    for col, (n_req, n) in enumerate(schedule):
        sorted_err = np.sort(errs[:, unique_ns.index(n)]) if errs is not None else None
        for tau in taus:
            key = (n, tau)
            if key not in bounds_cache:
                bounds_cache[key] = bound_simple(seq, n, tau)
            br: BoundResult = bounds_cache[key]
            fb = fitted_bound(n, tau)
            row = dict(kernel=kernel_label, n_requested=n_req, n=n,
                       saturated=n < n_req, tau=float(tau), M=M,
                       bound=br.radius, bound_source=br.source, bound_valid=br.valid,
                       bound_fitted=None if fb is None else fb.radius,
                       bound_fitted_source=None if fb is None else fb.source,
                       bound_fitted_valid=None if fb is None else fb.valid)
            if sorted_err is not None:
                rate = float(np.count_nonzero(sorted_err > br.radius)) / M
                row["rate"] = rate
                row["rate_ci3"] = 3.0 * math.sqrt(rate * (1.0 - rate) / M)
                if fb is not None:
                    row["rate_fitted"] = float(np.count_nonzero(sorted_err > fb.radius)) / M
                q, qlo, qhi = _quantile_with_ci(sorted_err, 1.0 - math.exp(-tau))
                row.update(quantile=q, quantile_lo=qlo, quantile_hi=qhi)
                report.add_check(
                    f"violation-rate n={n} tau={tau:g}",
                    rate <= math.exp(-tau) + _null_3sigma(tau, M),
                    f"rate={rate:.5f} allowed={math.exp(-tau) + _null_3sigma(tau, M):.5f}")
            report.add_row("gp", **row)

    report.summary.update(achieved_n=achieved, kernel=kernel_label,
                          fit=fitted, tail=tail_info,
                          n_schedule=[n for n, _ in schedule],
                          n_achieved=[n for _, n in schedule])
    xs = [n for _, n in schedule]
    series = {}
    for tau in taus:
        series[f"bound tau={tau:g}"] = [bounds_cache[(n, tau)].radius for _, n in schedule]
        if errs is not None:
            qs = []
            for _, n in schedule:
                se = np.sort(errs[:, unique_ns.index(n)])
                qs.append(_quantile_with_ci(se, 1.0 - math.exp(-tau))[0])
            series[f"quantile tau={tau:g}"] = qs
    report.plot = {"xlabel": "n", "ylabel": "sup deviation", "x": xs,
                   "series": series, "logy": True,
                   "title": f"posterior-mean concentration, {kernel_label}"}
    return report


# ---------------------------------------------------------------------------
# chi2


def weight_seq_from_config(fcfg: dict, master_seed: int, index: int):
    fam = fcfg["family"]
    if fam == "geometric":
        return WeightSeq.geometric(fcfg["ratio"], fcfg.get("scale", 1.0)), \
            f"geometric(ratio={fcfg['ratio']:g})"
    if fam == "polynomial":
        return WeightSeq.polynomial(fcfg["power"], fcfg.get("scale", 1.0)), \
            f"polynomial(power={fcfg['power']:g})"
    if fam == "explicit":
        return WeightSeq.explicit(fcfg["values"]), f"explicit(len={len(fcfg['values'])})"
    gen = streams.generator(master_seed, streams.LANE_MISC, index)
    vals = gen.uniform(0.0, 1.0, fcfg["size"])
    return WeightSeq.explicit(vals), f"explicit-random(size={fcfg['size']})"


CHI2_COLUMNS = ["family", "tau", "M", "bound", "rate", "rate_ci3", "exact_rate",
                "allowed"]


def run_chi2(cfg: dict, workers: int = 1) -> Report:
    report = Report(kind="chi2", config=cfg, seed=cfg["seed"], columns=CHI2_COLUMNS)
    taus = cfg["taus"]
    M = cfg["M"]
    series_rates = {}
    for i, fcfg in enumerate(cfg["families"]):
        b, label = weight_seq_from_config(fcfg, cfg["seed"], i)
        samples = sample_many(b, M, cfg["seed"], workers=workers)
        rates = []
        for tau in taus:
            bound = chisq_tail_bound(b, tau)
            rate, half = mc_violation_rate(b, tau, M, cfg["seed"], samples=samples)
            exact = None
            if b.kind == "explicit" and np.count_nonzero(b.values) == 1 and b.sup > 0:
                # Z = b0 (r^2 - 1) > bound  <=>  chi2_1 > bound / b0 + 1
                exact = float(_chi2_dist.sf(bound / b.sup + 1.0, 1))
            allowed = math.exp(-tau) + _null_3sigma(tau, M)
            report.add_row("chi2", family=label, tau=float(tau), M=M, bound=bound,
                           rate=rate, rate_ci3=half, exact_rate=exact, allowed=allowed)
            report.add_check(f"violation-rate {label} tau={tau:g}", rate <= allowed,
                             f"rate={rate:.5f} allowed={allowed:.5f}")
            if exact is not None:
                sigma0 = math.sqrt(exact * (1.0 - exact) / M)
                report.add_check(
                    f"exact-oracle {label} tau={tau:g}", abs(rate - exact) <= 3.0 * sigma0,
                    f"rate={rate:.5f} exact={exact:.5f} 3sigma={3 * sigma0:.5f}")
            rates.append(rate)
        series_rates[label] = rates
    series_rates["exp(-tau)"] = [math.exp(-t) for t in taus]
    report.plot = {"xlabel": "tau", "ylabel": "violation rate", "x": list(taus),
                   "series": series_rates, "logy": True,
                   "title": "weighted chi-squared tail"}
    return report


# ---------------------------------------------------------------------------
# spheres


SPHERE_COLUMNS = ["d1", "d2", "n", "tau", "M", "bound", "bound_source", "bound_valid",
                  "rate", "rate_ci3", "quantile", "quantile_lo", "quantile_hi",
                  "median_error", "slope", "grid", "method", "opnorm", "expected",
                  "relerr", "reduction_reldiff"]


def run_spheres(cfg: dict, workers: int = 1) -> Report:
    spec = ProductSphereSpec(cfg["d1"], cfg["d2"], cfg["C"], cfg["alpha"],
                             cfg["J_max"], cfg["tail_budget"])
    report = Report(kind="spheres", config=cfg, seed=cfg["seed"], columns=SPHERE_COLUMNS)
    ns = cfg["n_schedule"]
    taus = cfg["taus"]
    M = cfg["M"]

    errs = mc_truncation_errors(spec, ns, M, cfg["seed"], workers=workers) if M > 0 else None
    medians = []
    for k, n in enumerate(ns):
        se = np.sort(errs[:, k]) if errs is not None else None
        med = float(np.median(se)) if se is not None else None
        medians.append(med)
        for tau in taus:
            br = sphere_bound(spec, n, tau)
            cc = dim_envelope_constant(spec.d1) * dim_envelope_constant(spec.d2)
            direct = bound_polynomial_multi(
                spec.C, cc, 2.0 * spec.alpha + spec.d1 + spec.d2,
                spec.d1 + spec.d2 - 1.0, n, tau)
            reldiff = abs(br.radius - direct.radius) / direct.radius
            row = dict(d1=spec.d1, d2=spec.d2, n=n, tau=float(tau), M=M,
                       bound=br.radius, bound_source=br.source, bound_valid=br.valid,
                       median_error=med, reduction_reldiff=reldiff)
            if se is not None:
                rate = float(np.count_nonzero(se > br.radius)) / M
                row["rate"] = rate
                row["rate_ci3"] = 3.0 * math.sqrt(rate * (1.0 - rate) / M)
                q, qlo, qhi = _quantile_with_ci(se, 1.0 - math.exp(-tau))
                row.update(quantile=q, quantile_lo=qlo, quantile_hi=qhi)
                report.add_check(
                    f"violation-rate n={n} tau={tau:g}",
                    rate <= math.exp(-tau) + _null_3sigma(tau, M),
                    f"rate={rate:.5f} allowed={math.exp(-tau) + _null_3sigma(tau, M):.5f}")
            report.add_check(f"reduction-identity n={n} tau={tau:g}", reldiff <= 1e-12,
                             f"reldiff={reldiff:.2e}")
            report.add_row("sphere", **row)

    slope = None
    if errs is not None and len(ns) >= 2:
        # regress against log(1+n): the covariance family itself decays in
        # powers of (1+degree), so this regressor recovers its exponent
        # (log n underestimates the rate badly at single-digit degrees)
        x = np.log(np.asarray(ns, dtype=np.float64) + 1.0)
        y = np.log(np.asarray(medians))
        slope = float(np.polyfit(x, y, 1)[0])
        report.add_row("sphere-slope", d1=spec.d1, d2=spec.d2, slope=slope)
        report.add_check("median-error-slope", slope <= -spec.alpha + 0.2,
                         f"slope={slope:.3f} allowed={-spec.alpha + 0.2:.3f}")

    if cfg["opnorm_check"] and spec.d1 == 1 and spec.d2 == 1:
        aux = ProductSphereSpec(1, 1, cfg["C"], cfg["alpha"], 15, 0.05)
        for n in (0, 2, 7):
            got = torus_truncation_opnorm(aux, n, 64, method="gram")
            want = float(aux.B[n + 1])
            relerr = abs(got - want) / want
            report.add_row("sphere-opnorm", d1=1, d2=1, n=n, grid=64, method="gram",
                           opnorm=got, expected=want, relerr=relerr)
            report.add_check(f"opnorm-identity n={n}", relerr <= 1e-8,
                             f"relerr={relerr:.2e}")
        small = ProductSphereSpec(1, 1, cfg["C"], cfg["alpha"], 7, 0.05)
        g = torus_truncation_opnorm(small, 2, 32, method="gram")
        dn = torus_truncation_opnorm(small, 2, 32, method="dense")
        relerr = abs(g - dn) / max(dn, 1e-300)
        report.add_row("sphere-opnorm", d1=1, d2=1, n=2, grid=32, method="dense-vs-gram",
                       opnorm=g, expected=dn, relerr=relerr)
        report.add_check("opnorm-dense-cross-check", relerr <= 1e-10,
                         f"relerr={relerr:.2e}")

    report.summary.update(total_dim=spec.total_dim, discarded_rel_upper=spec.discarded_rel_upper,
                          median_slope=slope,
                          c_d1=dim_envelope_constant(spec.d1),
                          c_d2=dim_envelope_constant(spec.d2))
    series = {}
    for tau in taus:
        series[f"bound tau={tau:g}"] = [sphere_bound(spec, n, tau).radius for n in ns]
    if errs is not None:
        series["median error"] = medians
        for tau in taus:
            series[f"quantile tau={tau:g}"] = [
                _quantile_with_ci(np.sort(errs[:, k]), 1.0 - math.exp(-tau))[0]
                for k in range(len(ns))]
    report.plot = {"xlabel": "n", "ylabel": "L2 truncation error", "x": list(ns),
                   "series": series, "logx": True, "logy": True,
                   "title": f"sphere-product truncation, d1={spec.d1} d2={spec.d2}"}
    return report


# ---------------------------------------------------------------------------
# greedy (trace only) and bound tables


GREEDY_COLUMNS = ["kernel", "j", "c", "step", "index", "x0", "x1", "x2",
                  "model", "C", "alpha", "C1", "C2", "r2", "trust_lo", "trust_hi",
                  "fit_ok"]


def run_greedy(cfg: dict, workers: int = 1) -> Report:
    spec = kernel_from_config(cfg["kernel"])
    d = cfg["kernel"]["d"]
    grid = PointSet.uniform_grid(cfg["grid_size"], d)
    n_max = min(cfg["n_max"], len(grid))
    res = greedy_design(spec, grid, n_max, allow_partial=True)
    kernel_label = (f"matern(s={cfg['kernel']['s']:g},d={d})"
                    if cfg["kernel"]["family"] == "matern" else f"gaussian(d={d})")
    report = Report(kind="greedy", config=cfg, seed=cfg["seed"], columns=GREEDY_COLUMNS)
    for j, cj in enumerate(res.trace.values):
        report.add_row("trace", kernel=kernel_label, j=j, c=float(cj))
    for step, idx in enumerate(res.indices):
        pt = res.design.points[step]
        coords = {f"x{a}": float(pt[a]) for a in range(min(d, 3))}
        report.add_row("design", kernel=kernel_label, step=step, index=int(idx), **coords)
    try:
        fitted = fit_trace(res.trace.values, cfg["decay_model"], cfg["fit_floor"])
        report.add_row("fit", kernel=kernel_label, fit_ok=True, **fitted)
        report.summary["fit"] = fitted
    except FitFailureError as e:
        report.add_row("fit", kernel=kernel_label, fit_ok=False, model=cfg["decay_model"])
        report.add_check("decay-model-fit", False, str(e))
    report.summary.update(achieved_n=len(res.indices), kernel=kernel_label)
    report.plot = {"xlabel": "n", "ylabel": "max posterior variance",
                   "x": list(range(len(res.trace.values))),
                   "series": {"c_n": [float(v) for v in res.trace.values]},
                   "logy": True, "title": f"power trace, {kernel_label}"}
    return report


BOUND_COLUMNS = ["model", "C", "alpha", "C_d", "beta", "C1", "C2", "n", "tau",
                 "radius", "source", "valid"]


def run_bound_table(cfg: dict, workers: int = 1) -> Report:
    report = Report(kind="bound-table", config=cfg, seed=cfg["seed"], columns=BOUND_COLUMNS)
    series = {}
    for dk in cfg["decays"]:
        for n in cfg["n_schedule"]:
            for tau in cfg["taus"]:
                if dk["model"] == "polynomial":
                    br = bound_polynomial(dk["C"], dk["alpha"], n, tau)
                    label = f"poly(C={dk['C']:g},a={dk['alpha']:g})"
                elif dk["model"] == "polynomial-multi":
                    br = bound_polynomial_multi(dk["C"], dk["C_d"], dk["alpha"],
                                                dk["beta"], n, tau)
                    label = f"poly-multi(a={dk['alpha']:g},b={dk['beta']:g})"
                else:
                    br = bound_exponential(dk["C1"], dk["C2"], dk["alpha"], n, tau)
                    label = f"exp(C2={dk['C2']:g},a={dk['alpha']:g})"
                report.add_row("bound", model=dk["model"],
                               C=dk.get("C"), alpha=dk.get("alpha"), C_d=dk.get("C_d"),
                               beta=dk.get("beta"), C1=dk.get("C1"), C2=dk.get("C2"),
                               n=n, tau=float(tau), radius=br.radius, source=br.source,
                               valid=br.valid)
                series.setdefault(f"{label} tau={tau:g}", []).append(br.radius)
    report.plot = {"xlabel": "n", "ylabel": "radius", "x": list(cfg["n_schedule"]),
                   "series": {k: v for k, v in series.items()
                              if len(v) == len(cfg["n_schedule"])},
                   "logy": True, "title": "bound table"}
    return report


RUNNERS = {
    "greedy": run_greedy,
    "gp-concentration": run_gp_concentration,
    "chi2": run_chi2,
    "spheres": run_spheres,
    "bound-table": run_bound_table,
}


def run_experiment(cfg: dict, workers: int = 1) -> Report:
    if cfg.get("kind") not in RUNNERS:
        raise ConfigError(f"kind must be one of {tuple(RUNNERS)}")
    return RUNNERS[cfg["kind"]](cfg, workers)
