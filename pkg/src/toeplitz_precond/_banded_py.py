"""Banded LU with partial pivoting, pure Python/numpy reference kernel.

Storage follows the LAPACK general-band layout: ``ab[kl + ku + i - j, j]``
holds A[i, j], with ``kl`` extra leading rows reserved for pivot fill-in.
"""

import numpy as np


def band_factor(ab, kl, ku):
    """Factor in place-copy; returns (lu, piv). Raises ZeroDivisionError if singular."""
    lu = np.array(ab, dtype=float, order="C")
    n = lu.shape[1]
    kv = kl + ku
    piv = np.zeros(n, dtype=np.intp)
    ju = 0
    for j in range(n):
        km = min(kl, n - 1 - j)
        col = lu[kv: kv + km + 1, j]
        p = int(np.argmax(np.abs(col)))
        piv[j] = j + p
        if lu[kv + p, j] == 0.0:
            raise ZeroDivisionError(f"zero pivot in column {j}")
        ju = max(ju, min(j + ku + p, n - 1))
        cols = np.arange(j, ju + 1)
        if p:
            r1 = kv + j - cols
            r2 = r1 + p
            tmp = lu[r1, cols].copy()
            lu[r1, cols] = lu[r2, cols]
            lu[r2, cols] = tmp
        if km:
            lu[kv + 1: kv + km + 1, j] /= lu[kv, j]
            if ju > j:
                c = cols[1:]
                urow = lu[kv + j - c, c]
                rows = kv + j - c[None, :] + np.arange(1, km + 1)[:, None]
                lu[rows, c[None, :]] -= np.outer(lu[kv + 1: kv + km + 1, j], urow)
    return lu, piv


def band_solve(lu, piv, kl, ku, b, trans=False):
    """Solve A x = b (or A^T x = b) from :func:`band_factor` output."""
    x = np.array(b, dtype=float)
    vec = x.ndim == 1
    if vec:
        x = x[:, None]
    n = lu.shape[1]
    kv = kl + ku
    if not trans:
        for j in range(n):
            km = min(kl, n - 1 - j)
            p = piv[j]
            if p != j:
                x[[j, p]] = x[[p, j]]
            if km:
                x[j + 1: j + km + 1] -= np.outer(lu[kv + 1: kv + km + 1, j], x[j])
        for i in range(n - 1, -1, -1):
            hi = min(n - 1, i + kv)
            if hi > i:
                c = np.arange(i + 1, hi + 1)
                x[i] -= lu[kv + i - c, c] @ x[i + 1: hi + 1]
            x[i] /= lu[kv, i]
    else:
        for i in range(n):
            lo = max(0, i - kv)
            if i > lo:
                r = np.arange(lo, i)
                x[i] -= lu[kv + r - i, i] @ x[lo:i]
            x[i] /= lu[kv, i]
        for j in range(n - 1, -1, -1):
            km = min(kl, n - 1 - j)
            if km:
                x[j] -= lu[kv + 1: kv + km + 1, j] @ x[j + 1: j + km + 1]
            p = piv[j]
            if p != j:
                x[[j, p]] = x[[p, j]]
    return x[:, 0] if vec else x
