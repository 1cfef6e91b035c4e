"""Time the numba kernels against the pure-numpy fallback.

Usage: python benchmarks/bench_kernels.py [--size 256] [--repeat 20]
"""
import argparse
import time

import numpy as np

from dsmooth._kernels import _numba, _numpy
from dsmooth.blur import make_kernel


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--size", type=int, default=256)
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    n = args.size
    img = rng.uniform(0, 0.1, (n, n))
    w = make_kernel(9, 4.0).weights
    c = rng.normal(scale=0.1, size=n * n)
    b = rng.uniform(0, 0.1, n * n)

    cases = {
        "convolve 9x9": lambda m: m.convolve_symmetric(img, w),
        "prox_l1_box": lambda m: m.prox_l1_box(c, 0.3, 2e-6, 0.0, 0.1),
        "prox_absdev_box": lambda m: m.prox_absdev_box(c, 0.03, b, 0.0, 0.1),
        "conj_l1_box": lambda m: m.conj_l1_box(c, 2e-6, 0.1),
        "conj_absdev_box": lambda m: m.conj_absdev_box(c, b, 0.0, 0.1),
    }
    print(f"{n}x{n}, best of {args.repeat}")
    print(f"{'kernel':<18}{'numpy ms':>10}{'numba ms':>10}{'speedup':>9}{'max diff':>11}")
    for name, call in cases.items():
        ref, out = call(_numpy), call(_numba)  # also triggers compilation
        t_np = best_of(lambda: call(_numpy), args.repeat)
        t_nb = best_of(lambda: call(_numba), args.repeat)
        diff = float(np.max(np.abs(np.asarray(ref) - np.asarray(out))))
        print(f"{name:<18}{t_np * 1e3:>10.3f}{t_nb * 1e3:>10.3f}{t_np / t_nb:>9.1f}{diff:>11.1e}")


if __name__ == "__main__":
    main()
