"""Compare the numba and pure-numpy kernel backends.

Run with ``python3 benchmarks/bench_kernels.py [--n 1000000] [--repeat 5]``.
"""
from __future__ import annotations

import argparse
import math
import timeit

import numpy as np

from imprand import _kernels_numpy as numpy_kernels

try:
    from imprand import _kernels_numba as numba_kernels
except ImportError:  # numba not installed
    numba_kernels = None


def cases(n: int, rng):
    bits = rng.integers(0, 2, n).astype(np.uint8)
    m1, m0 = rng.uniform(0.5, 1.5, (2, n))
    inc = rng.uniform(-1, 1, n)
    sel = np.ones(n)
    R = 20
    xis = 1.0 / 2.0 ** (np.arange(1, R + 1) + 1)
    log_w = -np.arange(1, R + 1) * math.log(2)
    logT = np.concatenate(([0.0], np.cumsum(rng.normal(0.001, 0.05, n))))
    depth = min(20, max(1, int(math.log2(n))))
    vals = rng.normal(size=2**depth)
    lo = rng.uniform(0, 0.5, 2**depth - 1)
    hi = lo + rng.uniform(0, 0.5, 2**depth - 1)
    return {
        "log_capital": lambda k: k.log_capital(m1, m0, bits),
        "mixture_log_capital": lambda k: k.mixture_log_capital(inc, sel, xis, log_w, -R * math.log(2)),
        "cap_mix_log": lambda k: k.cap_mix_log(logT, 40, 1e-12),
        f"backward_lower(depth={depth})": lambda k: k.backward_lower(vals, lo, hi, depth),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=1_000_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(0)
    print(f"{'kernel':32s} {'numpy [ms]':>12s} {'numba [ms]':>12s} {'speed-up':>9s}")
    for name, fn in cases(args.n, rng).items():
        t_np = min(timeit.repeat(lambda: fn(numpy_kernels), number=1, repeat=args.repeat))
        if numba_kernels is None:
            print(f"{name:32s} {t_np * 1e3:12.2f} {'n/a':>12s}")
            continue
        fn(numba_kernels)  # compile outside the timing
        t_nb = min(timeit.repeat(lambda: fn(numba_kernels), number=1, repeat=args.repeat))
        print(f"{name:32s} {t_np * 1e3:12.2f} {t_nb * 1e3:12.2f} {t_np / t_nb:8.1f}x")


if __name__ == "__main__":
    main()
