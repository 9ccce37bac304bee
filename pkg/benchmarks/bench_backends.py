"""Timing comparison of the numba kernels against their pure-numpy twins.

Usage: python benchmarks/bench_backends.py [--reps 20000] [--n 2000]

Covers the four dual-path kernels (complete/majority, complete/threshold,
layer cascade, threshold DP band sweep).  The G(n, q) cascade is numpy-only
by design (per-draw binomial cost in numba scales with the neighbor count)
and is timed for reference.
"""
import argparse
import time

import numpy as np

from cascade_lab import backend, compute_delta_fast
from cascade_lab._kernels import (
    complete_majority_nb,
    complete_majority_np,
    complete_threshold_nb,
    complete_threshold_np,
    gnq_majority_np,
    layers_majority_nb,
    layers_majority_np,
    philox,
    replicate_seeds,
)
from cascade_lab.layers import asymptotic_layers


def timed(label, fn, repeat=3):
    fn()  # warm-up / jit
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    print(f"{label:38s} {min(times) * 1e3:10.1f} ms")
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--reps", type=int, default=20000)
    ap.add_argument("--n", type=int, default=2000)
    args = ap.parse_args()
    n, reps, p = args.n, args.reps, 2 / 3

    seeds = replicate_seeds(7, 0, reps)
    delta = compute_delta_fast(n, p).as_array()
    sizes = np.asarray(asymptotic_layers(n, p).sizes, dtype=np.int64)

    print(f"n={n}, reps={reps}, p={p:.4f}")
    pairs = [
        ("complete/majority", lambda: complete_majority_nb(n, p, seeds), lambda: complete_majority_np(n, p, reps, philox(7, 0))),
        ("complete/threshold", lambda: complete_threshold_nb(n, p, delta, seeds), lambda: complete_threshold_np(n, p, delta, reps, philox(7, 0))),
        ("layers/majority", lambda: layers_majority_nb(sizes, p, seeds), lambda: layers_majority_np(sizes, p, reps, philox(7, 0))),
    ]
    for label, nb, np_ in pairs:
        t_nb = timed(f"{label} [numba]", nb)
        t_np = timed(f"{label} [numpy]", np_)
        print(f"{'':38s}   speedup x{t_np / t_nb:.1f}")

    prev = backend.active_backend()
    backend.set_backend("numba")
    t_nb = timed("delta band sweep n=200k [numba]", lambda: compute_delta_fast(200_000, p))
    backend.set_backend("numpy")
    t_np = timed("delta band sweep n=200k [numpy]", lambda: compute_delta_fast(200_000, p))
    backend.set_backend(prev)
    print(f"{'':38s}   speedup x{t_np / t_nb:.1f}")

    timed("gnq/majority n=4096 [numpy only]", lambda: gnq_majority_np(4096, 0.05, p, max(reps // 10, 100), philox(7, 0)))


if __name__ == "__main__":
    main()
