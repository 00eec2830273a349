"""Dense spectra of preconditioned Toeplitz matrices and clustering counts."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.linalg

from .core import ToeplitzMatrix
from .errors import DenseCapError, NumericError

DENSE_CAP = 1024
CROSS_CHECK_MAX = 128


def _apply_inverse(M, X: np.ndarray) -> np.ndarray:
    if M is None:
        return X
    if hasattr(M, "apply_inverse"):
        return np.column_stack([M.apply_inverse(X[:, j]) for j in range(X.shape[1])])
    return np.column_stack([M(X[:, j]) for j in range(X.shape[1])])


def materialize_preconditioned(T: ToeplitzMatrix, M=None, cap: int = DENSE_CAP) -> np.ndarray:
    """Dense M^{-1} T, column j being M^{-1}(T e_j)."""
    if T.n > cap:
        raise DenseCapError(f"n={T.n} exceeds the dense cap {cap}")
    A = T.dense()
    return np.ascontiguousarray(_apply_inverse(M, A))


def eigenvalues(A: np.ndarray) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.shape[0] > DENSE_CAP:
        raise DenseCapError(f"n={A.shape[0]} exceeds the dense cap {DENSE_CAP}")
    try:
        return scipy.linalg.eigvals(A)
    except scipy.linalg.LinAlgError as exc:
        raise NumericError(f"eigenvalue decomposition failed: {exc}") from exc


def singular_values(A: np.ndarray, cross_check: bool = True, rtol: float = 1e-7) -> np.ndarray:
    """Singular values in descending order.

    Up to ``CROSS_CHECK_MAX`` rows they are compared with the square roots of
    the eigenvalues of A^T A, relative to the largest singular value.
    """
    A = np.asarray(A, dtype=float)
    if A.shape[0] > DENSE_CAP:
        raise DenseCapError(f"n={A.shape[0]} exceeds the dense cap {DENSE_CAP}")
    try:
        s = scipy.linalg.svd(A, compute_uv=False)
    except scipy.linalg.LinAlgError as exc:
        raise NumericError(f"singular value decomposition failed: {exc}") from exc
    if cross_check and A.shape[0] <= CROSS_CHECK_MAX:
        alt = np.sqrt(np.clip(np.linalg.eigvalsh(A.T @ A), 0, None))[::-1]
        scale = max(float(s[0]), np.finfo(float).tiny)
        if np.any(np.abs(alt - s) > rtol * scale):
            raise NumericError("singular values disagree with sqrt(eig(A^T A))")
    return s


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def contains(self, v) -> np.ndarray:
        v = np.real(np.asarray(v))
        return (v >= self.lo) & (v <= self.hi)


@dataclass(frozen=True)
class Rectangle:
    lo: float
    hi: float
    half_height: float

    def contains(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=complex)
        return (v.real >= self.lo) & (v.real <= self.hi) & (np.abs(v.imag) <= self.half_height)


@dataclass(frozen=True)
class Disk:
    center: complex
    radius: float

    def contains(self, v) -> np.ndarray:
        return np.abs(np.asarray(v, dtype=complex) - self.center) <= self.radius


@dataclass(frozen=True)
class ClusterStats:
    region: Interval | Rectangle | Disk
    inside: int
    outside: int
    outliers: np.ndarray


def cluster_stats(values, region) -> ClusterStats:
    """Boundary-inclusive membership count of ``values`` in ``region``."""
    values = np.asarray(values)
    mask = region.contains(values)
    return ClusterStats(region, int(mask.sum()), int((~mask).sum()), values[~mask])


def _fmt(v) -> str:
    # 17 significant digits round-trip every double
    return format(float(v), ".17g")


def export_spectrum(values, path) -> Path:
    """Write ``re,im`` rows for complex values or ``sigma`` rows for real ones."""
    values = np.asarray(values)
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if np.iscomplexobj(values):
            w.writerow(["re", "im"])
            w.writerows((_fmt(v.real), _fmt(v.imag)) for v in values)
        else:
            w.writerow(["sigma"])
            w.writerows((_fmt(v),) for v in values)
    return path


def load_spectrum(path) -> np.ndarray:
    with Path(path).open() as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    if header == ["re", "im"]:
        return np.array([complex(float(a), float(b)) for a, b in body], dtype=complex)
    return np.array([float(r[0]) for r in body])
