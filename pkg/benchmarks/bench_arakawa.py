"""Benchmark the numba Arakawa kernel against the numpy fallback.

Usage: python benchmarks/bench_arakawa.py [N ...]

Both implementations are timed in the same process; the numba path is
warmed once so compilation is excluded. Set BETAPLANE_NO_NUMBA=1 to
confirm the fallback is what the package selects without numba.
"""

from __future__ import annotations

import sys
import timeit

import numpy as np

from betaplane.kernels import NUMBA_ENABLED, arakawa_numba, arakawa_numpy


def bench(n: int, repeats: int = 20) -> None:
    rng = np.random.default_rng(0)
    a = rng.standard_normal((n, n))
    b = rng.standard_normal((n, n))
    dx = dy = 2.0 * np.pi / n

    t_numpy = min(
        timeit.repeat(lambda: arakawa_numpy(a, b, dx, dy), number=1,
                      repeat=repeats)
    )
    line = f"N={n:5d}  numpy {t_numpy * 1e3:8.3f} ms"
    if NUMBA_ENABLED:
        arakawa_numba(a, b, dx, dy)  # warm-up/compile
        t_numba = min(
            timeit.repeat(lambda: arakawa_numba(a, b, dx, dy), number=1,
                          repeat=repeats)
        )
        diff = np.abs(
            arakawa_numba(a, b, dx, dy) - arakawa_numpy(a, b, dx, dy)
        ).max()
        line += f"  numba {t_numba * 1e3:8.3f} ms  speedup {t_numpy / t_numba:5.2f}x  max|diff| {diff:.2e}"
    else:
        line += "  (numba disabled)"
    print(line)


if __name__ == "__main__":
    sizes = [int(s) for s in sys.argv[1:]] or [64, 128, 256, 512]
    for n in sizes:
        bench(n)
