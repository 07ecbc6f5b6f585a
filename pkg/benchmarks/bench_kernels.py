"""Benchmark: compiled hull/PAVA kernels against the pure-Python twins.

Run:  python benchmarks/bench_kernels.py [--sizes 1000 10000 100000]
"""

import argparse
import time

import numpy as np

from isorate._kernels import pure

try:
    from isorate._kernels import _hullc as compiled
except ImportError:
    compiled = None


def timeit(fn, *args, min_time=0.2):
    fn(*args)  # warm up
    n, t0 = 0, time.perf_counter()
    while time.perf_counter() - t0 < min_time:
        fn(*args)
        n += 1
    return (time.perf_counter() - t0) / n


def brownian_like(rng, n):
    x = np.arange(n, dtype=np.float64)
    y = np.cumsum(rng.standard_normal(n)) + 1e-4 * (x - n / 2) ** 2 / n
    return x, y


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", type=int, nargs="+", default=[1_000, 10_000, 100_000])
    args = parser.parse_args()
    rng = np.random.default_rng(0)
    print(f"{'kernel':<6} {'n':>8} {'pure (ms)':>12} {'compiled (ms)':>14} {'speedup':>8}")
    for n in args.sizes:
        x, y = brownian_like(rng, n)
        w = rng.uniform(0.5, 2.0, n)
        for name, fn_pure, fn_comp, fargs in (
            ("hull", pure.lower_hull_indices, getattr(compiled, "lower_hull_indices", None), (x, y)),
            ("pava", pure.pava_nondecreasing, getattr(compiled, "pava_nondecreasing", None), (y, w)),
        ):
            t_pure = timeit(fn_pure, *fargs) * 1e3
            if compiled is None:
                print(f"{name:<6} {n:>8} {t_pure:>12.3f} {'n/a':>14} {'n/a':>8}")
                continue
            assert np.array_equal(fn_pure(*fargs), fn_comp(*fargs)), "backends disagree"
            t_comp = timeit(fn_comp, *fargs) * 1e3
            print(f"{name:<6} {n:>8} {t_pure:>12.3f} {t_comp:>14.4f} {t_pure / t_comp:>7.0f}x")


if __name__ == "__main__":
    main()
