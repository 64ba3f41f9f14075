#!/usr/bin/env python3
"""Benchmark the batched statistics kernels: compiled extension vs numpy.

Both backends are imported directly (bypassing the import-time selection in
cgwitness._kernels) so a single run times the two implementations on
identical inputs. Typical workload shape: one row per Monte Carlo replicate,
one column per bin.

Usage:
    python3 benchmarks/bench_kernels.py [--rows 1000] [--cols 2048] [--repeats 7]
"""

import argparse
import time

import numpy as np


def _best_of(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rows", type=int, default=1000, help="replicates per batch")
    ap.add_argument("--cols", type=int, default=2048, help="bins per replicate")
    ap.add_argument("--repeats", type=int, default=7, help="timing repeats (best-of)")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    from cgwitness._kernels import _core_py

    backends = [("python", _core_py)]
    try:
        from cgwitness._kernels import _core

        backends.insert(0, ("cython", _core))
    except ImportError:
        print("compiled extension not available; timing the numpy backend only")

    rng = np.random.default_rng(args.seed)
    weights = rng.gamma(2.0, size=(args.rows, args.cols))
    centers = np.linspace(-4.0, 4.0, args.cols)
    per_row_centers = centers + rng.normal(0.0, 1e-3, size=(args.rows, 1))

    cases = [
        ("moments (shared centers)", lambda m: m.batch_weighted_moments(weights, centers)),
        ("moments (per-row centers)", lambda m: m.batch_weighted_moments(weights, per_row_centers)),
        ("entropy", lambda m: m.batch_entropy(weights)),
    ]

    # agreement check before timing
    for label, call in cases:
        results = [np.asarray(call(mod)) for _, mod in backends]
        for other in results[1:]:
            np.testing.assert_allclose(results[0], other, rtol=1e-12, atol=1e-12)

    print(f"rows={args.rows} cols={args.cols} best of {args.repeats}")
    header = f"{'kernel':28s}" + "".join(f"{name:>12s}" for name, _ in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10s}"
    print(header)
    for label, call in cases:
        times = [_best_of(lambda m=mod: call(m), args.repeats) for _, mod in backends]
        row = f"{label:28s}" + "".join(f"{t * 1e3:10.2f}ms" for t in times)
        if len(times) == 2:
            row += f"{times[1] / times[0]:9.2f}x"
        print(row)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
