# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled banded LU with partial pivoting (LAPACK general-band layout)."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs

cnp.import_array()


def band_factor(ab, Py_ssize_t kl, Py_ssize_t ku):
    cdef double[:, ::1] lu = np.array(ab, dtype=np.float64, order="C")
    cdef Py_ssize_t n = lu.shape[1]
    cdef Py_ssize_t kv = kl + ku
    piv_arr = np.zeros(n, dtype=np.intp)
    cdef Py_ssize_t[::1] piv = piv_arr
    cdef Py_ssize_t j, r, c, p, km, ju = 0
    cdef double best, tmp, mult, ujc
    for j in range(n):
        km = kl if kl < n - 1 - j else n - 1 - j
        p = 0
        best = fabs(lu[kv, j])
        for r in range(1, km + 1):
            if fabs(lu[kv + r, j]) > best:
                best = fabs(lu[kv + r, j])
                p = r
        piv[j] = j + p
        if lu[kv + p, j] == 0.0:
            raise ZeroDivisionError(f"zero pivot in column {j}")
        if j + ku + p < n - 1:
            if j + ku + p > ju:
                ju = j + ku + p
        else:
            ju = n - 1
        if p:
            for c in range(j, ju + 1):
                tmp = lu[kv + j - c, c]
                lu[kv + j - c, c] = lu[kv + j + p - c, c]
                lu[kv + j + p - c, c] = tmp
        if km:
            for r in range(1, km + 1):
                lu[kv + r, j] /= lu[kv, j]
            for c in range(j + 1, ju + 1):
                ujc = lu[kv + j - c, c]
                if ujc != 0.0:
                    for r in range(1, km + 1):
                        lu[kv + j + r - c, c] -= lu[kv + r, j] * ujc
    return np.asarray(lu), piv_arr


def band_solve(lu_in, piv_in, Py_ssize_t kl, Py_ssize_t ku, b, bint trans=False):
    cdef double[:, ::1] lu = np.ascontiguousarray(lu_in, dtype=np.float64)
    cdef Py_ssize_t[::1] piv = np.ascontiguousarray(piv_in, dtype=np.intp)
    xarr = np.array(b, dtype=np.float64, order="C")
    vec = xarr.ndim == 1
    if vec:
        xarr = xarr[:, None]
    cdef double[:, ::1] x = np.ascontiguousarray(xarr)
    cdef Py_ssize_t n = lu.shape[1]
    cdef Py_ssize_t m = x.shape[1]
    cdef Py_ssize_t kv = kl + ku
    cdef Py_ssize_t i, j, r, c, p, km, lo, hi, q
    cdef double tmp, l, d
    if not trans:
        for j in range(n):
            km = kl if kl < n - 1 - j else n - 1 - j
            p = piv[j]
            if p != j:
                for q in range(m):
                    tmp = x[j, q]
                    x[j, q] = x[p, q]
                    x[p, q] = tmp
            for r in range(1, km + 1):
                l = lu[kv + r, j]
                for q in range(m):
                    x[j + r, q] -= l * x[j, q]
        for i in range(n - 1, -1, -1):
            hi = i + kv if i + kv < n - 1 else n - 1
            for c in range(i + 1, hi + 1):
                l = lu[kv + i - c, c]
                for q in range(m):
                    x[i, q] -= l * x[c, q]
            d = lu[kv, i]
            for q in range(m):
                x[i, q] /= d
    else:
        for i in range(n):
            lo = i - kv if i - kv > 0 else 0
            for r in range(lo, i):
                l = lu[kv + r - i, i]
                for q in range(m):
                    x[i, q] -= l * x[r, q]
            d = lu[kv, i]
            for q in range(m):
                x[i, q] /= d
        for j in range(n - 1, -1, -1):
            km = kl if kl < n - 1 - j else n - 1 - j
            for r in range(1, km + 1):
                l = lu[kv + r, j]
                for q in range(m):
                    x[j, q] -= l * x[j + r, q]
            p = piv[j]
            if p != j:
                for q in range(m):
                    tmp = x[j, q]
                    x[j, q] = x[p, q]
                    x[p, q] = tmp
    out = np.asarray(x)
    return out[:, 0].copy() if vec else out
