"""Trigonometric polynomials, Chebyshev grids, discrete Remez and interpolation."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from .core import GeneratingSymbol
from .errors import ConvergenceError, InsufficientNodesError, SingularError, UsageError

COEFF_EPS = 1e-14


def _trim(c: np.ndarray, keep: int) -> np.ndarray:
    nz = np.nonzero(np.abs(c) > 0)[0]
    last = max(int(nz[-1]) + 1 if nz.size else 0, keep)
    return c[:last].copy()


class TrigPolynomial:
    """p(x) = sum_k a_k cos(kx) + i * sum_k b_k sin(kx).

    ``even`` holds a_0..a_{d1}; ``odd`` holds b_1..b_{d2}.
    """

    __slots__ = ("even", "odd")

    def __init__(self, even: Sequence[float] = (0.0,), odd: Sequence[float] = ()):
        e = np.atleast_1d(np.asarray(even, dtype=float))
        o = np.atleast_1d(np.asarray(odd, dtype=float)) if len(odd) else np.zeros(0)
        if e.size == 0:
            e = np.zeros(1)
        e.setflags(write=False)
        o.setflags(write=False)
        self.even = e
        self.odd = o

    @classmethod
    def constant(cls, value: float = 1.0) -> "TrigPolynomial":
        return cls([value])

    @classmethod
    def from_band(cls, t: Sequence[float]) -> "TrigPolynomial":
        """Inverse of :meth:`band_coeffs`: t_{-d}..t_d to cosine/sine coefficients."""
        t = np.asarray(t, dtype=float)
        d = (t.size - 1) // 2
        pos, neg = t[d + 1:], t[:d][::-1]
        even = np.concatenate(([t[d]], pos + neg))
        odd = pos - neg
        return cls(_trim(even, 1), _trim(odd, 0))

    @property
    def even_degree(self) -> int:
        nz = np.nonzero(np.abs(self.even) > COEFF_EPS)[0]
        return int(nz[-1]) if nz.size else 0

    @property
    def odd_degree(self) -> int:
        nz = np.nonzero(np.abs(self.odd) > COEFF_EPS)[0]
        return int(nz[-1]) + 1 if nz.size else 0

    @property
    def degree(self) -> int:
        return max(self.even_degree, self.odd_degree)

    def real_part(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        k = np.arange(self.even.size)
        return np.cos(np.multiply.outer(x, k)) @ self.even

    def imag_part(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.odd.size == 0:
            return np.zeros_like(x)
        k = np.arange(1, self.odd.size + 1)
        return np.sin(np.multiply.outer(x, k)) @ self.odd

    def __call__(self, x) -> np.ndarray:
        return self.real_part(x) + 1j * self.imag_part(x)

    def band_coeffs(self) -> np.ndarray:
        return band_coeffs(self)

    def __mul__(self, other: "TrigPolynomial") -> "TrigPolynomial":
        return product(self, other)

    def with_signs(self, sign_even: int, sign_odd: int) -> "TrigPolynomial":
        return TrigPolynomial(sign_even * self.even, sign_odd * self.odd)

    def as_symbol(self, name: str = "trigpoly") -> GeneratingSymbol:
        return GeneratingSymbol(name, self.real_part, self.imag_part)

    def __repr__(self) -> str:
        return f"TrigPolynomial(even={self.even.tolist()}, odd={self.odd.tolist()})"


def eval_poly(p: TrigPolynomial, x):
    """p1(x) + i p2(x); scalar in, complex scalar out."""
    v = p(np.asarray(x, dtype=float))
    return complex(v) if np.ndim(v) == 0 else v


def band_coeffs(p: TrigPolynomial) -> np.ndarray:
    """Fourier coefficients t_{-d}..t_d of p, d = max(d1, d2).

    t_0 = a_0, t_k = (a_k + b_k)/2, t_{-k} = (a_k - b_k)/2.
    """
    d = p.degree
    a = np.zeros(d + 1)
    b = np.zeros(d + 1)
    a[: min(d + 1, p.even.size)] = p.even[: d + 1]
    m = min(d, p.odd.size)
    b[1: m + 1] = p.odd[:m]
    t = np.empty(2 * d + 1)
    t[d] = a[0]
    t[d + 1:] = 0.5 * (a[1:] + b[1:])
    t[:d] = (0.5 * (a[1:] - b[1:]))[::-1]
    return t


def product(p: TrigPolynomial, q: TrigPolynomial) -> TrigPolynomial:
    """(p1 q1 - p2 q2) + i (p1 q2 + p2 q1).

    With p = sum t_k e^{ikx} the product-to-sum identities reduce to a
    convolution of the two band-coefficient sequences.
    """
    return TrigPolynomial.from_band(np.convolve(band_coeffs(p), band_coeffs(q)))


def chebyshev_nodes(k: int) -> np.ndarray:
    """First-kind Chebyshev points mapped to (0, pi), increasing."""
    if k < 1:
        raise UsageError("k must be positive")
    j = np.arange(1, k + 1)
    return (np.pi / 2) * (np.cos((2 * (k - j) + 1) * np.pi / (2 * k)) + 1)


def _basis(x: np.ndarray, degree: int, parity: str) -> np.ndarray:
    if parity == "even":
        return np.cos(np.multiply.outer(x, np.arange(degree + 1)))
    if parity == "odd":
        return np.sin(np.multiply.outer(x, np.arange(1, degree + 1)))
    raise UsageError("parity must be 'even' or 'odd'")


def _as_poly(coef: np.ndarray, parity: str) -> TrigPolynomial:
    if parity == "even":
        return TrigPolynomial(coef if coef.size else [0.0])
    return TrigPolynomial([0.0], coef)


@dataclass(frozen=True)
class ApproxResult:
    """Outcome of a Remez run.

    ``max_error`` is the levelled error on the final reference, ``reference``
    and ``reference_residuals`` form the equioscillation witness and
    ``grid_error`` is the largest residual over all nodes.
    """

    poly: TrigPolynomial
    max_error: float
    nodes_used: np.ndarray
    iterations: int
    reference: np.ndarray = field(default_factory=lambda: np.zeros(0))
    reference_residuals: np.ndarray = field(default_factory=lambda: np.zeros(0))
    grid_error: float = 0.0

    def equioscillates(self, rtol: float = 1e-10) -> bool:
        r = self.reference_residuals
        if r.size == 0:
            return False
        mags = np.abs(r)
        scale = max(mags.max(), 1e-300)
        if self.max_error <= 1e-13 * max(1.0, scale):
            return True
        signs = np.sign(r)
        return bool(np.all(signs[1:] == -signs[:-1]) and (mags.max() - mags.min()) <= rtol * scale)


Samples = Union[Callable[[np.ndarray], np.ndarray], Sequence[float], np.ndarray]


def _sample(samples: Samples, nodes: np.ndarray) -> np.ndarray:
    vals = samples(nodes) if callable(samples) else np.asarray(samples, dtype=float)
    vals = np.asarray(vals, dtype=float)
    if vals.shape != nodes.shape:
        raise UsageError("sample values must align with the nodes")
    if not np.all(np.isfinite(vals)):
        raise UsageError("samples must be finite on the node grid")
    return vals


def _alternating_extrema(r: np.ndarray) -> np.ndarray:
    """Index of the largest |r| in each maximal run of constant sign.

    Ties go to the smallest index, which makes the chosen subset the
    lexicographically smallest one.
    """
    s = np.sign(r)
    # zeros join the preceding run so they never split an alternation
    for i in range(1, s.size):
        if s[i] == 0:
            s[i] = s[i - 1]
    picks = []
    start = 0
    for i in range(1, s.size + 1):
        if i == s.size or s[i] != s[start]:
            seg = np.abs(r[start:i])
            picks.append(start + int(np.argmax(seg)))
            start = i
    return np.asarray(picks, dtype=int)


def remez(samples: Samples, degree: int, parity: str = "even", domain: tuple[float, float] | None = None,
          nodes: np.ndarray | None = None, grid_size: int = 512, max_exchanges: int = 100,
          tol: float = 1e-10) -> ApproxResult:
    """Discrete best uniform approximation by a cosine (even) or sine (odd) polynomial.

    The node grid defaults to ``grid_size`` Chebyshev points mapped to
    ``domain = (0, c)``.  Explicit ``nodes`` override the grid.  The odd basis
    vanishes at 0, so x = 0 never enters an odd reference.
    """
    if degree < 0:
        raise UsageError("degree must be non-negative")
    if nodes is None:
        lo, hi = domain if domain is not None else (0.0, np.pi)
        nodes = lo + chebyshev_nodes(grid_size) * (hi - lo) / np.pi
    nodes = np.sort(np.asarray(nodes, dtype=float))
    vals = _sample(samples, nodes)
    if parity == "odd":
        keep = np.abs(np.sin(nodes)) > 1e-14
        nodes, vals = nodes[keep], vals[keep]
    m = degree + 1 if parity == "even" else degree
    if m == 0:
        err = float(np.max(np.abs(vals))) if vals.size else 0.0
        return ApproxResult(TrigPolynomial(), err, nodes, 0, grid_error=err)
    if nodes.size < m + 1:
        raise InsufficientNodesError(f"{nodes.size} nodes for {m} basis functions")
    Phi = _basis(nodes, degree, parity)
    scale = max(float(np.max(np.abs(vals))), 1e-300)
    ref = np.unique(np.round(np.linspace(0, nodes.size - 1, m + 1)).astype(int))
    alt = (-1.0) ** np.arange(m + 1)
    seen = set()
    for it in range(1, max_exchanges + 1):
        seen.add(ref.tobytes())
        system = np.column_stack([Phi[ref], alt])
        try:
            sol = np.linalg.solve(system, vals[ref])
        except np.linalg.LinAlgError as exc:
            raise SingularError("reference system is singular") from exc
        coef, E = sol[:m], abs(sol[m])
        r = vals - Phi @ coef
        rmax = float(np.max(np.abs(r)))
        if rmax <= E * (1 + tol) + 1e-14 * scale:
            return ApproxResult(_as_poly(coef, parity), E, nodes, it, nodes[ref], r[ref], rmax)
        ext = _alternating_extrema(r)
        top = int(np.argmax(np.abs(r)))
        while ext.size > m + 1:
            # trim from the end holding the smaller residual; the global max survives
            if abs(r[ext[0]]) < abs(r[ext[-1]]) and ext[0] != top:
                ext = ext[1:]
            elif ext[-1] != top:
                ext = ext[:-1]
            else:
                ext = ext[1:]
        # a revisited reference means the exchange is cycling on rounding noise
        if ext.size < m + 1 or ext.tobytes() in seen:
            return ApproxResult(_as_poly(coef, parity), E, nodes, it, nodes[ref], r[ref], rmax)
        ref = ext
    raise ConvergenceError(f"Remez exchange did not converge in {max_exchanges} steps")


def interpolate(samples: Samples, degree: int, parity: str = "even",
                domain: tuple[float, float] | None = None) -> TrigPolynomial:
    """Interpolating cosine or sine polynomial at Chebyshev nodes.

    Even: degree+1 Chebyshev nodes on [0, pi].  Odd: x = 0 (matched
    automatically by every sine polynomial) plus ``degree`` Chebyshev
    nodes on [0, c], with c taken from ``domain``.
    """
    if parity == "even":
        nodes = chebyshev_nodes(degree + 1)
    elif parity == "odd":
        if degree == 0:
            return TrigPolynomial()
        c = domain[1] if domain is not None else np.pi
        nodes = chebyshev_nodes(degree) * c / np.pi
    else:
        raise UsageError("parity must be 'even' or 'odd'")
    vals = _sample(samples, nodes)
    A = _basis(nodes, degree, parity)
    if np.linalg.cond(A) > 1e12:
        raise SingularError("interpolation nodes are (nearly) coincident")
    coef = np.linalg.solve(A, vals)
    return _as_poly(coef, parity)


def combine(even: TrigPolynomial, odd: TrigPolynomial) -> TrigPolynomial:
    """Even part of the first argument plus odd part of the second."""
    return TrigPolynomial(even.even, odd.odd)
