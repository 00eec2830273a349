"""Banded LU kernel selection.

The compiled kernel is used when the extension was built; otherwise the
numpy implementation with the same signature takes over.  Set
``TOEPLITZ_PRECOND_PURE=1`` to force the fallback.
"""

import os

import numpy as np

from . import _banded_py

if os.environ.get("TOEPLITZ_PRECOND_PURE", "") not in ("", "0"):
    _impl = _banded_py
    BACKEND = "python"
else:
    try:
        from . import _banded as _impl  # type: ignore[attr-defined]
        BACKEND = "cython"
    except ImportError:
        _impl = _banded_py
        BACKEND = "python"

band_factor = _impl.band_factor
band_solve = _impl.band_solve


def toeplitz_band_storage(t: np.ndarray, n: int) -> tuple[np.ndarray, int, int]:
    """LAPACK band layout of the n x n Toeplitz matrix with diagonals t_{-d}..t_d."""
    t = np.asarray(t, dtype=float)
    d = (t.size - 1) // 2
    kl = ku = d
    ab = np.zeros((2 * kl + ku + 1, n))
    for k in range(-d, d + 1):
        # A[i, j] = t_{i-j}; row index kl + ku + i - j = kl + ku + k
        ab[kl + ku + k, max(0, -k): n - max(0, k)] = t[k + d]
    return ab, kl, ku
