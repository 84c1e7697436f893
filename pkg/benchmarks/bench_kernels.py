"""Benchmark the compiled kernel extension against the pure-NumPy fallback.

Runs each hot kernel on identical inputs under both backends and prints a
small table of per-call timings plus the speedup.  The workload mirrors the
replication engine: batches of row-sorted samples.

Usage:
    python benchmarks/bench_kernels.py [--rows 4096] [--cols 400] [--repeat 20]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from trimedge import _kernels_py
from trimedge.population import TrimSpec

try:
    from trimedge import _kernels as _kernels_c
except ImportError:  # pragma: no cover - extension not built
    _kernels_c = None


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--rows", type=int, default=4096, help="samples per batch")
    parser.add_argument("--cols", type=int, default=400, help="sample size N")
    parser.add_argument("--repeat", type=int, default=20, help="timing repetitions")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    batch = np.sort(rng.exponential(size=(args.rows, args.cols)), axis=1)
    spec = TrimSpec(0.1, 0.9, args.cols)
    k, m = spec.k, spec.m
    half = 0.5 * args.cols**-0.25
    flat = np.sort(rng.standard_normal(200_000))
    targets = 0.5 * (1.0 + np.tanh(flat / 2.0))  # any nondecreasing target

    cases = [
        ("batch_trimmed_mean", lambda mod: mod.batch_trimmed_mean(batch, k, m)),
        ("batch_plugin_moments", lambda mod: mod.batch_plugin_moments(batch, k, m)),
        ("batch_density_counts", lambda mod: mod.batch_density_counts(batch, k, half)),
        ("step_sup_distance", lambda mod: mod.step_sup_distance(flat, targets)),
    ]

    if _kernels_c is None:
        print("compiled extension not available; timing the fallback only")
    print(f"{'kernel':24s} {'python (ms)':>12s} {'compiled (ms)':>14s} {'speedup':>8s}")
    for name, call in cases:
        t_py = _time(lambda: call(_kernels_py), args.repeat) * 1e3
        if _kernels_c is not None:
            t_c = _time(lambda: call(_kernels_c), args.repeat) * 1e3
            print(f"{name:24s} {t_py:12.3f} {t_c:14.3f} {t_py / t_c:7.2f}x")
        else:
            print(f"{name:24s} {t_py:12.3f} {'-':>14s} {'-':>8s}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
