#!/usr/bin/env python3
"""Time the numba kernels against the pure-numpy fallbacks.

Run from the repository root:

    python3 benchmarks/jit_vs_numpy.py [--sizes 10,50,200,1000] [--repeats 200]

Both variants are imported from rruc.kernels directly, so the timing is
independent of the RRUC_NO_NUMBA environment switch.
"""

import argparse
import time

import numpy as np

from rruc.kernels import (NUMBA_ENABLED, _dispatch_core_jit,
                          _dispatch_core_numpy, _relax_value_grad_jit,
                          _relax_value_grad_numpy)


def dispatch_args(rng, n):
    a = rng.uniform(1e-4, 1e-2, n)
    b = rng.uniform(10.0, 45.0, n)
    lo = rng.uniform(20.0, 80.0, n)
    hi = lo + rng.uniform(50.0, 200.0, n)
    demand = 0.6 * float(hi.sum())
    return a, b, lo, hi, demand


def relax_args(rng, n):
    has_p = np.ones(n, dtype=bool)
    a = rng.uniform(1e-4, 1e-2, n)
    b = rng.uniform(10.0, 45.0, n)
    c = rng.uniform(50.0, 400.0, n)
    pen = rng.uniform(100.0, 5000.0, n)
    y0 = rng.integers(0, 2, n).astype(float)
    lin = rng.uniform(-10.0, 10.0, n)
    wterm = rng.uniform(0.0, 50.0, n)
    pmax = rng.uniform(100.0, 400.0, n)
    pmin = rng.uniform(20.0, 90.0, n)
    x = np.concatenate([rng.random(n), rng.uniform(20.0, 400.0, n), [0.0]])
    mu = rng.uniform(0.0, 10.0, 3)
    return (x, has_p, a, b, c, pen, y0, lin, wterm, pmax, pmin,
            0.5 * float(pmax.sum()), 0.8 * float(pmax.sum()),
            1.2 * float(pmin.sum()), mu, 10.0)


def bench(fn, args, repeats):
    fn(*args)  # warm-up (triggers JIT compilation on the numba variant)
    t0 = time.perf_counter()
    for _ in range(repeats):
        fn(*args)
    return (time.perf_counter() - t0) / repeats


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="10,50,200,1000")
    ap.add_argument("--repeats", type=int, default=200)
    opts = ap.parse_args()
    sizes = [int(s) for s in opts.sizes.split(",")]
    rng = np.random.default_rng(0)

    print(f"numba available in this process: {NUMBA_ENABLED}")
    header = f"{'kernel':<18}{'n':>6}{'jit [us]':>12}{'numpy [us]':>12}{'speedup':>9}"
    print(header)
    print("-" * len(header))
    for kernel, make, jit, plain in (
            ("dispatch_core", dispatch_args,
             _dispatch_core_jit, _dispatch_core_numpy),
            ("relax_value_grad", relax_args,
             _relax_value_grad_jit, _relax_value_grad_numpy)):
        for n in sizes:
            args = make(rng, n)
            t_jit = bench(jit, args, opts.repeats)
            t_np = bench(plain, args, opts.repeats)
            print(f"{kernel:<18}{n:>6}{t_jit * 1e6:>12.1f}"
                  f"{t_np * 1e6:>12.1f}{t_np / t_jit:>8.1f}x")


if __name__ == "__main__":
    main()
