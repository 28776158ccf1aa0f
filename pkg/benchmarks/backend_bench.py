#!/usr/bin/env python3
"""Timing comparison: compiled extension vs the pure-NumPy fallback.

Runs the three hot kernels (Bessel K_nu, the radial profile built on it, and
Newton-basis greedy selection) on identical inputs through both backends,
reports best-of-N wall times and the worst elementwise disagreement.

    python3 benchmarks/backend_bench.py [--size 500000] [--grid 600]
                                        [--picks 256] [--repeats 5]
"""

import argparse
import time

import numpy as np

from gpbounds._core import _purepy

try:
    from gpbounds._core import _corex
except ImportError:
    _corex = None


def best_of(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=500_000,
                    help="vector length for the pointwise kernels")
    ap.add_argument("--grid", type=int, default=600,
                    help="candidate count for greedy selection")
    ap.add_argument("--picks", type=int, default=256,
                    help="greedy design size")
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    x = rng.uniform(1e-3, 40.0, size=args.size)
    t = np.sort(rng.uniform(0.0, 1.0, size=args.grid))
    r = np.abs(t[:, None] - t[None, :])
    K = _purepy.matern_profile(1.5, r.ravel()).reshape(args.grid, args.grid)

    workloads = [
        ("bessel_k nu=1.5", lambda impl: impl.bessel_k(1.5, x)),
        ("matern_profile nu=1.5", lambda impl: impl.matern_profile(1.5, x)),
        (f"newton_greedy {args.grid}->{args.picks}",
         lambda impl: impl.newton_greedy(K, args.picks)),
    ]

    if _corex is None:
        print("compiled extension not built; timing the pure backend only\n")
    print(f"{'workload':<28}{'compiled':>12}{'pure':>12}{'speedup':>10}{'max|diff|':>12}")
    for name, call in workloads:
        tp = best_of(lambda: call(_purepy), args.repeats)
        if _corex is None:
            print(f"{name:<28}{'-':>12}{tp * 1e3:>10.1f}ms{'-':>10}{'-':>12}")
            continue
        tc = best_of(lambda: call(_corex), args.repeats)
        a, b = call(_corex), call(_purepy)
        if isinstance(a, tuple):  # greedy returns (idx, V, trace)
            assert np.array_equal(a[0], b[0]), "backends picked different designs"
            diff = max(float(np.max(np.abs(u - v))) for u, v in zip(a[1:], b[1:]))
        else:
            diff = float(np.max(np.abs(a - b)))
        print(f"{name:<28}{tc * 1e3:>10.1f}ms{tp * 1e3:>10.1f}ms"
              f"{tp / tc:>9.1f}x{diff:>12.1e}")


if __name__ == "__main__":
    main()
