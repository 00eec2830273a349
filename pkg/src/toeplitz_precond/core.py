"""Toeplitz matrices, generating symbols, Fourier coefficients and fast products.

A symbol is a complex 2*pi-periodic function ``f = f1 + i*f2`` with ``f1`` even
and ``f2`` odd, so its Fourier coefficients

    t_k = (1/2pi) * integral_{-pi}^{pi} f(x) exp(-i k x) dx

are real.  The n x n Toeplitz matrix has entry ``(j, q) = t_{j-q}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DenseCapError, EvaluationError, ParityError, UsageError

DENSE_CAP = 4096

RealFunction = Callable[[np.ndarray], np.ndarray]


def wrap_angle(x):
    """Map angles into (-pi, pi]."""
    y = np.mod(np.asarray(x, dtype=float) + np.pi, 2 * np.pi) - np.pi
    return np.where(y == -np.pi, np.pi, y)


@dataclass(frozen=True)
class GeneratingSymbol:
    """Complex symbol f = f1 + i*f2 on (-pi, pi].

    ``eval_real`` and ``eval_imag`` take and return numpy arrays.
    ``breakpoints`` lists points in (-pi, pi) where either part has a kink
    or a jump; the endpoints +-pi are always treated as piece boundaries.
    """

    name: str
    eval_real: RealFunction
    eval_imag: RealFunction
    breakpoints: tuple[float, ...] = ()

    def __post_init__(self):
        bps = tuple(sorted(float(b) for b in self.breakpoints))
        if any(not (-np.pi < b <= np.pi) for b in bps):
            raise UsageError("breakpoints must lie in (-pi, pi]")
        object.__setattr__(self, "breakpoints", bps)

    def real(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(np.asarray(self.eval_real(x), dtype=float), x.shape)

    def imag(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(np.asarray(self.eval_imag(x), dtype=float), x.shape)

    def __call__(self, x) -> np.ndarray:
        """Evaluate f at angles given in any period; wrapped to (-pi, pi]."""
        x = wrap_angle(x)
        return self.real(x) + 1j * self.imag(x)

    def pieces(self) -> list[tuple[float, float]]:
        edges = [-np.pi] + [b for b in self.breakpoints if -np.pi < b < np.pi] + [np.pi]
        return [(a, b) for a, b in zip(edges[:-1], edges[1:]) if b > a]

    def jumps_at_pi(self, rtol: float = 1e-12) -> bool:
        """True when the odd part does not vanish at pi, i.e. the periodic extension jumps."""
        x = np.array([np.pi, 0.0, np.pi / 2])
        scale = 1.0 + np.max(np.abs(self.imag(x)))
        return abs(float(self.imag(np.array([np.pi]))[0])) > rtol * scale

    def check_parity(self, samples: int = 1001, rtol: float = 1e-12) -> None:
        """Raise ParityError unless f1 is even and f2 is odd on a sample grid."""
        x = np.linspace(0.0, np.pi, samples)[1:-1]
        r_pos, r_neg = self.real(x), self.real(-x)
        i_pos, i_neg = self.imag(x), self.imag(-x)
        if np.any(np.abs(r_pos - r_neg) > rtol * (1 + np.abs(r_pos))):
            raise ParityError(f"{self.name}: real part is not even")
        if np.any(np.abs(i_pos + i_neg) > rtol * (1 + np.abs(i_pos))):
            raise ParityError(f"{self.name}: imaginary part is not odd")
        if abs(float(self.imag(np.array([0.0]))[0])) > rtol:
            raise ParityError(f"{self.name}: imaginary part does not vanish at 0")


@dataclass(frozen=True)
class QuadratureConfig:
    """Sample budget for the Fourier-coefficient quadrature.

    Each smooth piece gets ``max(min_samples, per_dimension * n)`` samples,
    rounded up to a power of two.  With ``richardson`` the rule is applied at
    N and N/2 and the O(h^2) term is extrapolated away.
    """

    min_samples: int = 2**16
    per_dimension: int = 64
    richardson: bool = True
    imag_rtol: float = 1e-10

    def samples(self, n: int) -> int:
        want = max(self.min_samples, self.per_dimension * n)
        return 1 << int(np.ceil(np.log2(want)))


def _linear_panel_weights(theta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Integrals of (1-u) e^{i theta u} and u e^{i theta u} over [0, 1], by series.

    The closed forms lose accuracy like eps/theta^2 for small theta; the
    quadrature keeps |theta| < 0.2 so sixteen terms are exact to rounding.
    """
    z = 1j * np.asarray(theta, dtype=float)
    a_plus_b = np.zeros_like(z)
    b = np.zeros_like(z)
    term = np.ones_like(z)
    fact = 1.0
    for m in range(16):
        if m:
            term = term * z
            fact *= m
        a_plus_b += term / (fact * (m + 1))
        b += term / (fact * (m + 2))
    return a_plus_b - b, b


def _filon_sum(values: np.ndarray, x0: float, h: float, L: int, ks: np.ndarray,
               tail: tuple[float, complex] | None) -> np.ndarray:
    """integral of L(x) exp(-i k x) over [x0, x0 + M h (+ tail)] for every k.

    ``L(x)`` is the piecewise-linear interpolant of ``values`` at x0 + j h,
    j = 0..M; ``tail = (H, f_end)`` adds one last panel of length H < h.  The
    oscillatory factor is integrated exactly on each panel, so the error is
    O(h^2 |f''|) uniformly in k.  Since h = 2 pi / L the node sum is a DFT.
    """
    m = values.size - 1
    omega = -ks.astype(float)
    theta = omega * h
    A, B = _linear_panel_weights(theta)
    W = A + B * np.exp(-1j * theta)
    folded = np.zeros(L, dtype=complex)
    np.add.at(folded, np.arange(values.size) % L, values)
    spectrum = np.fft.fft(folded)
    sums = spectrum[np.mod(ks, L)] * np.exp(1j * omega * x0)
    e0 = np.exp(1j * omega * x0)
    em = np.exp(1j * omega * (x0 + m * h))
    out = h * (W * sums + (A - W) * values[0] * e0 + (B * np.exp(-1j * theta) - W) * values[-1] * em)
    if tail is not None:
        H, f_end = tail
        At, Bt = _linear_panel_weights(omega * H)
        out = out + H * em * (At * values[-1] + Bt * f_end)
    return out


def _piece_integrals(sym: GeneratingSymbol, a: float, b: float, h: float, L: int, ks: np.ndarray) -> np.ndarray:
    m = int(np.floor((b - a) / h * (1 + 1e-13)))
    x = a + h * np.arange(m + 1)
    x[0] = a if a == -np.pi else np.nextafter(a, b)
    rest = b - (a + m * h)
    tail_x = b if b == np.pi else np.nextafter(b, a)
    if rest <= 1e-9 * h:
        x[-1] = tail_x
        pts = x
    else:
        pts = np.append(x, tail_x)
    vals = sym.real(pts) + 1j * sym.imag(pts)
    if not np.all(np.isfinite(vals)):
        raise EvaluationError(f"{sym.name}: non-finite value on [{a}, {b}]")
    if rest <= 1e-9 * h:
        return _filon_sum(vals, a, h, L, ks, None), vals
    return _filon_sum(vals[:-1], a, h, L, ks, (rest, vals[-1])), vals


def fourier_coefficients(sym: GeneratingSymbol, n: int, quad: QuadratureConfig | None = None) -> np.ndarray:
    """Real coefficients t_{-(n-1)} ... t_{n-1} of ``sym``.

    Integration is split at the symbol's breakpoints, every piece receiving at
    least ``quad.samples(n)`` nodes of a common step 2*pi/L.  The imaginary
    part of each coefficient must vanish by parity; it is checked and discarded.
    """
    if n < 1:
        raise UsageError("n must be positive")
    quad = quad or QuadratureConfig()
    pieces = sym.pieces()
    shortest = min(b - a for a, b in pieces)
    L = quad.samples(n) * (1 << int(np.ceil(np.log2(2 * np.pi / shortest) - 1e-12)))
    h = 2 * np.pi / L
    ks = np.arange(-(n - 1), n)
    total = np.zeros(ks.size, dtype=complex)
    fmax = 0.0
    for a, b in pieces:
        fine, vals = _piece_integrals(sym, a, b, h, L, ks)
        fmax = max(fmax, float(np.max(np.abs(vals))))
        if quad.richardson:
            coarse, _ = _piece_integrals(sym, a, b, 2 * h, L // 2, ks)
            fine = (4.0 * fine - coarse) / 3.0
        total += fine
    t = total / (2 * np.pi)
    resid = float(np.max(np.abs(t.imag)))
    if resid > quad.imag_rtol * max(fmax, 1e-300):
        raise ParityError(f"{sym.name}: imaginary residue {resid:.3e} in Fourier coefficients")
    return np.ascontiguousarray(t.real)


def _next_pow2(m: int) -> int:
    return 1 << int(np.ceil(np.log2(max(m, 1))))


class ToeplitzMatrix:
    """Real n x n Toeplitz matrix stored by its 2n-1 diagonals.

    ``diagonals[k + n - 1] = t_k``; ``t_k`` with k > 0 sits on the k-th
    subdiagonal.  The spectrum of a zero-padded circulant embedding of length
    the next power of two >= 2n is cached for O(n log n) products.
    """

    __slots__ = ("n", "diagonals", "_spectrum", "_length")

    def __init__(self, diagonals: Sequence[float]):
        d = np.array(diagonals, dtype=float)
        if d.ndim != 1 or d.size % 2 == 0:
            raise UsageError("need an odd number (2n-1) of diagonal values")
        if not np.all(np.isfinite(d)):
            raise UsageError("diagonal values must be finite")
        d.setflags(write=False)
        self.n = (d.size + 1) // 2
        self.diagonals = d
        self._length = _next_pow2(2 * self.n)
        col = np.zeros(self._length)
        col[: self.n] = d[self.n - 1:]
        if self.n > 1:
            col[-(self.n - 1):] = d[: self.n - 1]
        spec = np.fft.rfft(col)
        spec.setflags(write=False)
        self._spectrum = spec

    @classmethod
    def from_symbol(cls, sym: GeneratingSymbol, n: int, quad: QuadratureConfig | None = None) -> "ToeplitzMatrix":
        return cls(fourier_coefficients(sym, n, quad))

    def t(self, k: int) -> float:
        if abs(k) >= self.n:
            return 0.0
        return float(self.diagonals[k + self.n - 1])

    @property
    def first_column(self) -> np.ndarray:
        return self.diagonals[self.n - 1:]

    @property
    def first_row(self) -> np.ndarray:
        return self.diagonals[: self.n][::-1]

    def matvec(self, v, transpose: bool = False) -> np.ndarray:
        return toeplitz_matvec(self, v, transpose)

    def rmatvec(self, v) -> np.ndarray:
        return toeplitz_matvec(self, v, True)

    def dense(self, cap: int = DENSE_CAP) -> np.ndarray:
        return dense(self, cap)

    def leading(self, k: int) -> "ToeplitzMatrix":
        """The leading k x k principal submatrix, itself Toeplitz."""
        if not 1 <= k <= self.n:
            raise UsageError("k must satisfy 1 <= k <= n")
        return ToeplitzMatrix(self.diagonals[self.n - k: self.n + k - 1])

    def norm_inf(self) -> float:
        a = np.abs(self.diagonals)
        c = np.concatenate(([0.0], np.cumsum(a)))
        rows = c[np.arange(self.n) + self.n] - c[np.arange(self.n)]
        return float(rows.max())

    def __repr__(self) -> str:
        return f"ToeplitzMatrix(n={self.n})"


def toeplitz_matvec(T: ToeplitzMatrix, v, transpose: bool = False) -> np.ndarray:
    """T @ v (or T.T @ v) through the circulant embedding; v may hold columns."""
    v = np.asarray(v, dtype=float)
    if v.shape[0] != T.n:
        raise UsageError(f"length mismatch: matrix is {T.n}, vector is {v.shape[0]}")
    spec = np.conj(T._spectrum) if transpose else T._spectrum
    if v.ndim == 2:
        spec = spec[:, None]
    vf = np.fft.rfft(v, n=T._length, axis=0)
    return np.fft.irfft(spec * vf, n=T._length, axis=0)[: T.n]


def dense(T: ToeplitzMatrix, cap: int = DENSE_CAP) -> np.ndarray:
    if T.n > cap:
        raise DenseCapError(f"n={T.n} exceeds dense cap {cap}")
    j = np.arange(T.n)
    return T.diagonals[(j[:, None] - j[None, :]) + T.n - 1].copy()


def leading_parts(T: ToeplitzMatrix, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Symmetric and antisymmetric parts of the leading k x k block."""
    if k > T.n:
        raise UsageError("k exceeds n")
    Tk = dense(T.leading(k))
    return 0.5 * (Tk + Tk.T), 0.5 * (Tk - Tk.T)


def save_matrix_file(T: ToeplitzMatrix, path) -> None:
    """Plain text: ``n`` on the first line, then t_{-(n-1)} .. t_{n-1} one per line."""
    lines = [str(T.n)] + [format(float(v), ".17g") for v in T.diagonals]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_matrix_file(path) -> ToeplitzMatrix:
    with open(path) as fh:
        tokens = fh.read().split()
    if not tokens:
        raise UsageError(f"{path}: empty matrix file")
    try:
        n = int(tokens[0])
        values = [float(v) for v in tokens[1:]]
    except ValueError as exc:
        raise UsageError(f"{path}: {exc}") from None
    if n < 1 or len(values) != 2 * n - 1:
        raise UsageError(f"{path}: expected {2 * n - 1} diagonal values for n={n}, found {len(values)}")
    return ToeplitzMatrix(values)
