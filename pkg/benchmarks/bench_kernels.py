#!/usr/bin/env python3
"""Benchmark the compiled kernels against the NumPy fallback.

Times the array primitives the iteration hot path is built from, plus one
composite split-feasibility iteration, at several grid sizes.

Run:  python benchmarks/bench_kernels.py [--repeats 7]
"""

import argparse
import math
import time

import numpy as np

from kmsplit import _kernels_np

try:
    from kmsplit import _kernels
except ImportError:
    _kernels = None

SIZES = (64, 512, 4096, 32768)


def timeit(fn, args, repeats, inner=200):
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        for _ in range(inner):
            fn(*args)
        best = min(best, (time.perf_counter() - t0) / inner)
    return best


def kernel_cases(n, rng):
    w = np.full(n, 1.0 / n)
    x = rng.standard_normal(n)
    y = rng.standard_normal(n)
    return [
        ("dot_w", (w, x, y)),
        ("diff_norm_w", (w, x, y)),
        ("axpby", (0.3, x, 0.7, y)),
        ("cumint_forward", (x, w)),
    ]


def sfp_step(mod, t, w, x, beta, lam, gamma):
    """One split-feasibility iteration written against a kernel module."""
    two_pi = 2.0 * math.pi
    z = mod.scale(beta, x)
    c = 3.0 / (8.0 * math.pi ** 3) * mod.dot_w(w, t, z)
    lz = mod.scale(c, t)
    c2 = 3.0 / (8.0 * math.pi ** 3) * mod.dot_w(w, t, lz)
    v = mod.scale(c2, t)
    y = mod.axpby(1.0, z, -gamma, v)
    total = mod.weighted_sum(w, y)
    if total > 1.0:
        y = mod.add_scalar(y, (1.0 - total) / two_pi)
    x_next = mod.axpby(1.0 - lam, z, lam, y)
    return mod.diff_norm_w(w, x_next, x)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=7)
    args = parser.parse_args()

    if _kernels is None:
        print("compiled kernels are not built; benchmarking the fallback only")
    rng = np.random.default_rng(7)

    header = f"{'kernel':<16} {'n':>6} {'numpy':>12} {'cython':>12} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for n in SIZES:
        for name, case_args in kernel_cases(n, rng):
            t_np = timeit(getattr(_kernels_np, name), case_args, args.repeats)
            if _kernels is not None:
                t_cy = timeit(getattr(_kernels, name), case_args, args.repeats)
                print(f"{name:<16} {n:>6} {t_np * 1e6:>10.2f}us "
                      f"{t_cy * 1e6:>10.2f}us {t_np / t_cy:>7.2f}x")
            else:
                print(f"{name:<16} {n:>6} {t_np * 1e6:>10.2f}us {'-':>12} {'-':>8}")

    print()
    print("composite split-feasibility iteration step")
    for n in SIZES:
        h = 2.0 * math.pi / n
        t_nodes = (np.arange(n) + 0.5) * h
        w = np.full(n, h)
        x = t_nodes.copy()
        step_args = (t_nodes, w, x, 0.9, 0.4, 0.5)
        t_np = timeit(lambda *a: sfp_step(_kernels_np, *a), step_args,
                      args.repeats, inner=50)
        if _kernels is not None:
            t_cy = timeit(lambda *a: sfp_step(_kernels, *a), step_args,
                          args.repeats, inner=50)
            print(f"{'sfp_step':<16} {n:>6} {t_np * 1e6:>10.2f}us "
                  f"{t_cy * 1e6:>10.2f}us {t_np / t_cy:>7.2f}x")
        else:
            print(f"{'sfp_step':<16} {n:>6} {t_np * 1e6:>10.2f}us")


if __name__ == "__main__":
    main()
