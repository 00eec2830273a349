"""Root-elimination polynomials and the preconditioner families.

Every preconditioner exposes ``apply_inverse(r, transpose=False)``; with
``transpose=True`` it applies the inverse of the (real) transpose, which is
what the normal-equation solver needs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .approx import TrigPolynomial, band_coeffs
from .banded import band_factor, band_solve, toeplitz_band_storage
from .core import ToeplitzMatrix, wrap_angle
from .errors import (EliminationError, NonRealCirculantError, ParityError, SingularError,
                     UsageError)

SIGN_GRID_SIZE = 2048
SIGN_ORDER = ((1, 1), (1, -1), (-1, 1), (-1, -1))


@dataclass(frozen=True)
class RootSpec:
    """Roots of f1 and f2 with their multiplicities.

    ``zero_root`` is (m0_1, m0_2) for the root at x = 0; ``nonzero_roots``
    holds (x_i, m_i1, m_i2) with x_i in (0, pi).  Signs select the sign of
    the real and imaginary parts of the elimination polynomial.
    """

    zero_root: tuple[int, int] | None = None
    nonzero_roots: tuple[tuple[float, int, int], ...] = ()
    sign1: int = 1
    sign2: int = 1

    def __post_init__(self):
        roots = tuple((float(x), int(a), int(b)) for x, a, b in self.nonzero_roots)
        object.__setattr__(self, "nonzero_roots", roots)
        if self.zero_root is not None:
            m1, m2 = self.zero_root
            if m1 != int(m1) or m2 != int(m2):
                raise UsageError("multiplicities must be integers")
            object.__setattr__(self, "zero_root", (int(m1), int(m2)))
        for x, a, b in roots:
            if a < 0 or b < 0:
                raise UsageError("multiplicities must be non-negative")
            if not 0 < x < np.pi:
                raise UsageError(f"nonzero root {x} outside (0, pi)")
        xs = [r[0] for r in roots]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise UsageError("nonzero roots must be strictly increasing")
        if self.sign1 not in (1, -1) or self.sign2 not in (1, -1):
            raise UsageError("signs must be +1 or -1")

    @property
    def is_empty(self) -> bool:
        z = self.zero_root or (0, 0)
        return z == (0, 0) and all(a == 0 and b == 0 for _, a, b in self.nonzero_roots)

    def with_signs(self, sign1: int, sign2: int) -> "RootSpec":
        return RootSpec(self.zero_root, self.nonzero_roots, sign1, sign2)

    def locations(self) -> list[float]:
        out = [0.0] if self.zero_root and any(self.zero_root) else []
        return out + [x for x, a, b in self.nonzero_roots if a or b]


def _power(p: TrigPolynomial, m: int) -> TrigPolynomial:
    out = TrigPolynomial.constant(1.0)
    for _ in range(m):
        out = out * p
    return out


def build_elimination_poly(roots: RootSpec) -> TrigPolynomial:
    """Trigonometric polynomial g sharing the zeros of f.

    If every root has m1 <= m2 the real polynomial
    sign1 (2 - 2cos x)^{m0_1/2} prod (cos x_i - cos x)^{m_i1} suffices.
    Otherwise the imaginary part sign2 sin(x)^{m0_2} prod (cos x_i - cos x)^{m_i2}
    is added.
    """
    m01, m02 = roots.zero_root or (0, 0)
    if m01 % 2:
        raise ParityError("multiplicity of the real part at 0 must be even")
    if roots.is_empty:
        return TrigPolynomial.constant(1.0)
    g1 = _power(TrigPolynomial([2.0, -2.0]), m01 // 2)
    for x, a, _ in roots.nonzero_roots:
        g1 = g1 * _power(TrigPolynomial([np.cos(x), -1.0]), a)
    real_only = m01 <= m02 and all(a <= b for _, a, b in roots.nonzero_roots)
    if real_only:
        return TrigPolynomial(roots.sign1 * g1.even)
    # an odd f2 always vanishes at 0, so the sine factor is present at least once
    ms = m02 if roots.zero_root is not None else 1
    if ms % 2 == 0:
        raise ParityError("multiplicity of the imaginary part at 0 must be odd")
    even = TrigPolynomial.constant(1.0)
    for x, _, b in roots.nonzero_roots:
        even = even * _power(TrigPolynomial([np.cos(x), -1.0]), b)
    # (i sin x)^ms * even = i^ms sin^ms even, so undo the power of i
    isin = _power(TrigPolynomial([0.0], [1.0]), ms) * even
    odd = isin.odd * (-1.0) ** ((ms - 1) // 2)
    return TrigPolynomial(roots.sign1 * g1.even, roots.sign2 * odd)


def sign_grid(size: int = SIGN_GRID_SIZE) -> np.ndarray:
    """Midpoint grid on (-pi, pi); avoids 0 and +-pi."""
    return -np.pi + (np.arange(size) + 0.5) * (2 * np.pi / size)


def _periodic_distance(x: np.ndarray, centers: Iterable[float]) -> np.ndarray:
    d = np.full(x.shape, np.inf)
    for c in centers:
        for s in (c, -c):
            d = np.minimum(d, np.abs(wrap_angle(x - s)))
    return d


def real_ratio_margin(grid: np.ndarray, values: np.ndarray, g: TrigPolynomial,
                      exclude: Sequence[float] = (), radius: float = 0.0) -> float:
    """min over the grid of Re(f/g), ignoring radius-neighbourhoods of ``exclude``."""
    keep = _periodic_distance(grid, exclude) > radius if len(exclude) else np.ones(grid.shape, bool)
    gv = g(grid)
    keep &= np.abs(gv) > 0
    if not np.any(keep):
        raise EliminationError("no admissible grid points")
    return float(np.min((values[keep] / gv[keep]).real))


def choose_signs(grid: np.ndarray, values: np.ndarray, g: TrigPolynomial,
                 exclude: Sequence[float] = (), radius: float = 1e-6) -> tuple[int, int]:
    """Sign pair for (g1, g2) maximizing min Re(f/g); the minimum must be positive.

    ``values`` are samples of f on ``grid``.  Ties keep the first pair in the
    order (+,+), (+,-), (-,+), (-,-).
    """
    values = np.asarray(values, dtype=complex)
    best, best_pair = -np.inf, None
    for s1, s2 in SIGN_ORDER:
        m = real_ratio_margin(grid, values, g.with_signs(s1, s2), exclude, radius)
        if m > best:
            best, best_pair = m, (s1, s2)
    if not best > 0:
        raise EliminationError(f"no sign pair gives Re(f/g) > 0 (best min {best:.3e})")
    return best_pair


class Preconditioner:
    """Base class; the identity."""

    kind = "identity"

    def __init__(self, n: int):
        self.n = int(n)

    def apply_inverse(self, r, transpose: bool = False) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        self._check(r)
        return r.copy()

    def matvec(self, x, transpose: bool = False) -> np.ndarray:
        return np.asarray(x, dtype=float).copy()

    def dense(self) -> np.ndarray:
        return self.matvec(np.eye(self.n))

    def _check(self, r: np.ndarray) -> None:
        if r.shape[0] != self.n:
            raise UsageError(f"length mismatch: preconditioner is {self.n}, vector is {r.shape[0]}")


IdentityPreconditioner = Preconditioner


class BandPreconditioner(Preconditioner):
    """T_n(p) for a trigonometric polynomial p, held as a banded LU factorization."""

    kind = "band"

    def __init__(self, poly: TrigPolynomial, n: int):
        super().__init__(n)
        self.poly = poly
        self.coeffs = band_coeffs(poly)
        d = (self.coeffs.size - 1) // 2
        if n <= 2 * d:
            raise UsageError(f"n={n} must exceed twice the degree {d}")
        if not np.any(self.coeffs):
            raise SingularError("band polynomial is zero")
        ab, self.kl, self.ku = toeplitz_band_storage(self.coeffs, n)
        try:
            self.lu, self.piv = band_factor(ab, self.kl, self.ku)
        except ZeroDivisionError as exc:
            raise SingularError(str(exc)) from exc

    @property
    def toeplitz(self) -> ToeplitzMatrix:
        d = self.kl
        full = np.zeros(2 * self.n - 1)
        full[self.n - 1 - d: self.n + d] = self.coeffs
        return ToeplitzMatrix(full)

    def apply_inverse(self, r, transpose: bool = False) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        self._check(r)
        return band_solve(self.lu, self.piv, self.kl, self.ku, r, bool(transpose))

    def matvec(self, x, transpose: bool = False) -> np.ndarray:
        return self.toeplitz.matvec(x, transpose)


class CirculantPreconditioner(Preconditioner):
    """Real circulant given by its eigenvalues at theta_j = 2 (j-1) pi / n.

    Eigenvalue ``values[j]`` belongs to the symbol sampled at theta_j, i.e.
    the circulant whose first column is ``fft(values) / n``.
    """

    kind = "circulant"

    def __init__(self, values, rtol: float = 1e-9):
        values = np.asarray(values, dtype=complex)
        super().__init__(values.size)
        scale = float(np.max(np.abs(values))) if values.size else 0.0
        if scale == 0.0 or np.min(np.abs(values)) <= 1e-14 * scale:
            raise SingularError("circulant has a zero eigenvalue")
        mirror = np.conj(values[(-np.arange(self.n)) % self.n])
        if np.max(np.abs(values - mirror)) > rtol * scale:
            raise NonRealCirculantError("eigenvalues are not conjugate-symmetric")
        col = np.fft.fft(values) / self.n
        if np.max(np.abs(col.imag)) > rtol * scale:
            raise NonRealCirculantError("first column has a non-negligible imaginary part")
        self.eigenvalues = values
        self.column = col.real.copy()
        self._spectrum = np.fft.fft(self.column)

    @classmethod
    def from_column(cls, column) -> "CirculantPreconditioner":
        """Circulant with the given real first column."""
        column = np.asarray(column, dtype=float)
        n = column.size
        values = np.fft.ifft(column) * n
        return cls(values)

    def _solve(self, r: np.ndarray, spectrum: np.ndarray) -> np.ndarray:
        if r.ndim == 2:
            spectrum = spectrum[:, None]
        return np.fft.ifft(np.fft.fft(r, axis=0) / spectrum, axis=0).real

    def apply_inverse(self, r, transpose: bool = False) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        self._check(r)
        return self._solve(r, np.conj(self._spectrum) if transpose else self._spectrum)

    def matvec(self, x, transpose: bool = False) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        s = np.conj(self._spectrum) if transpose else self._spectrum
        if x.ndim == 2:
            s = s[:, None]
        return np.fft.ifft(np.fft.fft(x, axis=0) * s, axis=0).real


class CompositePreconditioner(Preconditioner):
    """Band-times-circulant M = T_n(g) C; the inverse is C^{-1} T_n(g)^{-1}."""

    kind = "composite"

    def __init__(self, band: BandPreconditioner, circulant: CirculantPreconditioner):
        if band.n != circulant.n:
            raise UsageError("band and circulant parts differ in size")
        super().__init__(band.n)
        self.band = band
        self.circulant = circulant

    def apply_inverse(self, r, transpose: bool = False) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        self._check(r)
        if transpose:
            return self.band.apply_inverse(self.circulant.apply_inverse(r, True), True)
        return self.circulant.apply_inverse(self.band.apply_inverse(r))

    def matvec(self, x, transpose: bool = False) -> np.ndarray:
        if transpose:
            return self.circulant.matvec(self.band.matvec(x, True), True)
        return self.band.matvec(self.circulant.matvec(x))


def band_preconditioner(p: TrigPolynomial, n: int) -> BandPreconditioner:
    return BandPreconditioner(p, n)


def circulant_from_values(values) -> CirculantPreconditioner:
    return CirculantPreconditioner(values)


def circulant_nodes(n: int) -> np.ndarray:
    return 2 * np.pi * np.arange(n) / n


def circulant_strang(T: ToeplitzMatrix) -> CirculantPreconditioner:
    """Wrap the central diagonals: s_k = t_k for k <= n/2, else t_{k-n}."""
    n = T.n
    if n < 2:
        raise UsageError("n must be at least 2")
    k = np.arange(n)
    half = n // 2
    s = np.where(k <= half, T.diagonals[np.minimum(k, n - 1) + n - 1], T.diagonals[np.maximum(k - n, 1 - n) + n - 1])
    return CirculantPreconditioner.from_column(s)


def circulant_optimal(T: ToeplitzMatrix) -> CirculantPreconditioner:
    """Frobenius-nearest circulant: c_k = ((n-k) t_k + k t_{k-n}) / n."""
    n = T.n
    if n < 2:
        raise UsageError("n must be at least 2")
    k = np.arange(n)
    tk = T.diagonals[k + n - 1]
    tkn = np.where(k > 0, T.diagonals[np.maximum(k - n, 1 - n) + n - 1], 0.0)
    return CirculantPreconditioner.from_column(((n - k) * tk + k * tkn) / n)


def composite(band: BandPreconditioner, circ: CirculantPreconditioner) -> CompositePreconditioner:
    return CompositePreconditioner(band, circ)


def composite_apply_inverse(P: CompositePreconditioner, r, conj_transpose: bool = False) -> np.ndarray:
    return P.apply_inverse(r, conj_transpose)


def pole_indices(gvals: np.ndarray, rtol: float = 1e-12) -> np.ndarray:
    """Nodes where g vanishes (relative to its maximum) and f/g is a 0/0 point."""
    a = np.abs(np.asarray(gvals))
    return np.nonzero(a <= rtol * a.max())[0]


def shift_pole_values(values, pole_indices: Sequence[int], symmetrize: bool = True) -> np.ndarray:
    """Replace flagged values by the mean of their nearest unflagged cyclic neighbours.

    With ``symmetrize`` the result is averaged with its conjugate mirror so
    that the circulant built from it stays real.
    """
    v = np.array(values, dtype=complex)
    n = v.size
    bad = np.zeros(n, dtype=bool)
    idx = np.asarray(list(pole_indices), dtype=int)
    if idx.size and (idx.min() < -n or idx.max() >= n):
        raise UsageError("pole index out of range")
    if idx.size == 0:
        return v
    bad[idx % n] = True
    if bad.all():
        raise SingularError("every value is flagged as a pole")
    src = v.copy()
    for j in np.nonzero(bad)[0]:
        lo = (j - 1) % n
        while bad[lo]:
            lo = (lo - 1) % n
        hi = (j + 1) % n
        while bad[hi]:
            hi = (hi + 1) % n
        v[j] = 0.5 * (src[lo] + src[hi])
    if symmetrize:
        v = 0.5 * (v + np.conj(v[(-np.arange(n)) % n]))
    return v


def band_times_circulant(f_values, g: TrigPolynomial, n: int) -> CompositePreconditioner:
    """T_n(g) C_n(f/g) from symbol samples at the circulant nodes."""
    theta = circulant_nodes(n)
    gv = g(theta)
    poles = pole_indices(gv)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.asarray(f_values, dtype=complex) / gv
    ratio = shift_pole_values(ratio, poles) if poles.size else ratio
    return CompositePreconditioner(BandPreconditioner(g, n), CirculantPreconditioner(ratio))
