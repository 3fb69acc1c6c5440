"""Timing comparison of the compiled and pure-numpy kernel paths.

Runs the batch decoder and the pairwise-distance kernel on a grid of problem
sizes and prints one row per (kernel, size, path) with the best-of-repeats
wall time.  The compiled path is warmed once before timing so JIT cost never
pollutes a measurement.

    python3 benchmarks/bench_kernels.py --repeats 5
"""

import argparse
import time

import numpy as np

from snm._kernels import HAS_NUMBA, KERNEL_PATH, decode_batch, pairwise_sq_dists

DECODE_SIZES = [(50, 16, 20_000), (200, 34, 50_000), (500, 64, 100_000)]
PAIRWISE_SIZES = [(500, 64), (2000, 64), (5000, 128)]


def _best_of(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_decode(paths, repeats, rng):
    print(f"{'kernel':<10} {'M':>6} {'d':>5} {'N':>8} {'path':<7} {'seconds':>10}")
    for m, d, n in DECODE_SIZES:
        vs = rng.normal(size=(m, d))
        ys = rng.normal(size=(n, d))
        base = None
        for path in paths:
            decode_batch(vs, ys[:64], path=path)  # warm the JIT / allocator
            dt = _best_of(lambda: decode_batch(vs, ys, path=path), repeats)
            out = decode_batch(vs, ys, path=path)
            if base is None:
                base = out
            elif not np.array_equal(base, out):
                raise AssertionError(f"paths disagree at M={m} d={d} N={n}")
            print(f"{'decode':<10} {m:>6} {d:>5} {n:>8} {path:<7} {dt:>10.4f}")


def bench_pairwise(paths, repeats, rng):
    print(f"{'kernel':<10} {'M':>6} {'d':>5} {'':>8} {'path':<7} {'seconds':>10}")
    for m, d in PAIRWISE_SIZES:
        vs = rng.normal(size=(m, d))
        base = None
        for path in paths:
            pairwise_sq_dists(vs[:32], path=path)
            dt = _best_of(lambda: pairwise_sq_dists(vs, path=path), repeats)
            out = pairwise_sq_dists(vs, path=path)
            if base is None:
                base = out
            elif not np.allclose(base, out, rtol=1e-10, atol=1e-10):
                raise AssertionError(f"paths disagree at M={m} d={d}")
            print(f"{'pairwise':<10} {m:>6} {d:>5} {'':>8} {path:<7} {dt:>10.4f}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    paths = ["numpy", "numba"] if HAS_NUMBA else ["numpy"]
    print(f"default path: {KERNEL_PATH} (numba available: {HAS_NUMBA})")
    rng = np.random.default_rng(args.seed)
    bench_decode(paths, args.repeats, rng)
    print()
    bench_pairwise(paths, args.repeats, rng)


if __name__ == "__main__":
    main()
