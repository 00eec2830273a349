"""Compare the compiled and pure-Python banded LU kernels.

    python3 benchmarks/bench_banded.py --sizes 1024,8192 --bandwidth 6 --repeat 3
"""

import argparse
import time

import numpy as np

from toeplitz_precond import _banded_py
from toeplitz_precond.banded import toeplitz_band_storage

try:
    from toeplitz_precond import _banded as _compiled
except ImportError:
    _compiled = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="1024,2048,8192")
    ap.add_argument("--bandwidth", type=int, default=6)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if _compiled is None:
        print("compiled kernel not built; run `pip install -e . --no-build-isolation` first")
        return
    rng = np.random.default_rng(0)
    d = args.bandwidth
    print(f"{'n':>6} {'factor py':>11} {'factor cy':>11} {'speedup':>8} {'solve py':>10} {'solve cy':>10} {'speedup':>8}")
    for n in map(int, args.sizes.split(",")):
        t = rng.standard_normal(2 * d + 1)
        t[d] += 2 * d + 2  # diagonally dominant, so pivoting is exercised but the matrix stays regular
        ab, kl, ku = toeplitz_band_storage(t, n)
        b = rng.standard_normal(n)
        fp, (lu_p, piv_p) = best_of(lambda: _banded_py.band_factor(ab, kl, ku), args.repeat)
        fc, (lu_c, piv_c) = best_of(lambda: _compiled.band_factor(ab, kl, ku), args.repeat)
        sp, xp = best_of(lambda: _banded_py.band_solve(lu_p, piv_p, kl, ku, b, False), args.repeat)
        sc, xc = best_of(lambda: _compiled.band_solve(lu_c, piv_c, kl, ku, b, False), args.repeat)
        assert np.allclose(xp, xc, rtol=1e-10, atol=1e-12)
        print(f"{n:>6} {fp:>11.5f} {fc:>11.5f} {fp / fc:>7.1f}x {sp:>10.5f} {sc:>10.5f} {sp / sc:>7.1f}x")


if __name__ == "__main__":
    main()
