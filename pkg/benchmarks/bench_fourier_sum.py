"""Timing of the Fourier-sum kernel: compiled extension against the numpy fallback.

Usage: python benchmarks/bench_fourier_sum.py [--repeat N]
"""

import argparse
import timeit

import numpy as np

from mzsim import _fallback
from mzsim import kernels

CASES = [(256, 4096), (1024, 16384), (4096, 32768)]


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)

    try:
        from mzsim import _kernels
    except ImportError:
        _kernels = None
    print(f"selected backend: {kernels.BACKEND}")
    if _kernels is None:
        print("compiled extension not built; only the fallback is timed")
    print(f"{'nodes':>7} {'outputs':>8} {'numpy s':>10} {'cython s':>10} {'speedup':>8} {'max rel diff':>13}")
    rng = np.random.default_rng(0)
    for n_nodes, count in CASES:
        x = np.sort(rng.uniform(-2.4e-6, 2.4e-6, n_nodes))
        w = rng.normal(size=n_nodes) + 1j * rng.normal(size=n_nodes)
        k0, dk = -2e8, 4e8 / count

        def run_np():
            return _fallback.fourier_sum(x, w, k0, dk, count, -1)

        t_np = min(timeit.repeat(run_np, number=1, repeat=args.repeat))
        if _kernels is None:
            print(f"{n_nodes:>7} {count:>8} {t_np:>10.4f} {'-':>10} {'-':>8} {'-':>13}")
            continue

        def run_cy():
            return _kernels.fourier_sum(x, w, k0, dk, count, -1)

        t_cy = min(timeit.repeat(run_cy, number=1, repeat=args.repeat))
        a, b = run_np(), run_cy()
        diff = np.max(np.abs(a - b)) / np.max(np.abs(a))
        print(f"{n_nodes:>7} {count:>8} {t_np:>10.4f} {t_cy:>10.4f} {t_np / t_cy:>8.2f} {diff:>13.2e}")


if __name__ == "__main__":
    main()
