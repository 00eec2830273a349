"""Named test symbols, their true roots, and the known-symbol preconditioner builders."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .approx import TrigPolynomial, interpolate, remez
from .core import GeneratingSymbol, ToeplitzMatrix, wrap_angle
from .errors import UsageError
from .precond import (BandPreconditioner, CirculantPreconditioner, RootSpec, band_times_circulant,
                      build_elimination_poly, choose_signs, circulant_nodes, circulant_optimal,
                      circulant_strang, sign_grid)

ODD_CUTOFF = 5 * np.pi / 7
PI = np.pi


def h1(x):
    x = np.asarray(x, dtype=float)
    return np.where(x < -PI / 2, -PI - x, np.where(x < PI / 2, x, PI - x))


def h2(x):
    x = np.asarray(x, dtype=float)
    return np.where(x < -0.5, -1 - x, np.where(x < 0.5, x, 1 - x))


def h3(x):
    x = np.asarray(x, dtype=float)
    s = 2 * PI - 3
    return np.select(
        [x < -PI + 0.5, x < -0.5, x < 0.5, x < PI - 0.5],
        [x + PI, -(x + 1) / s, x / s, -(x - 1) / s],
        x - PI,
    )


def _sq(x):
    return np.asarray(x, dtype=float) ** 2


def _one(x):
    return np.ones_like(np.asarray(x, dtype=float))


_H1_BP = (-PI / 2, PI / 2)
_H2_BP = (-0.5, 0.5)
_H3_BP = (-PI + 0.5, -0.5, 0.5, PI - 0.5)


@dataclass(frozen=True)
class CorpusEntry:
    id: str
    symbol: GeneratingSymbol
    roots: RootSpec
    description: str


def _entry(id, real, imag, bps, roots, desc):
    return CorpusEntry(id, GeneratingSymbol(id, real, imag, bps), roots, desc)


_NONE = RootSpec()

CORPUS: dict[str, CorpusEntry] = {e.id: e for e in [
    _entry("f1", lambda x: _sq(x) + 1, h1, _H1_BP, _NONE, "x^2 + 1 + i h1"),
    _entry("f2", _sq, lambda x: np.asarray(x) ** 3, (), RootSpec((2, 3)), "x^2 + i x^3"),
    _entry("f3", _sq, lambda x: np.asarray(x, dtype=float), (), RootSpec((2, 1)), "x^2 + i x"),
    _entry("f4", lambda x: _sq(x) - 1, h2, _H2_BP, RootSpec((0, 1), ((1.0, 1, 1),)), "x^2 - 1 + i h2"),
    _entry("f5", lambda x: (_sq(x) - 1) ** 2, lambda x: np.asarray(x) * (_sq(x) - 4), (),
           RootSpec((0, 1), ((1.0, 2, 0), (2.0, 0, 1))), "(x^2 - 1)^2 + i x (x^2 - 4)"),
    _entry("f7", lambda x: _sq(x) - 1, lambda x: np.asarray(x) ** 3, (), _NONE, "x^2 - 1 + i x^3"),
    _entry("f8", lambda x: 1 + np.cos(2 * np.asarray(x)) + np.cos(3 * np.asarray(x)),
           lambda x: -2 * np.sin(x) - np.sin(2 * np.asarray(x)) - np.sin(3 * np.asarray(x)), (), _NONE,
           "1 + cos 2x + cos 3x + i(-2 sin x - sin 2x - sin 3x)"),
    _entry("f9", lambda x: (_sq(x) - 1) ** 2, lambda x: np.asarray(x) * (_sq(x) - 1), (),
           RootSpec((0, 1), ((1.0, 2, 1),)), "(x^2 - 1)^2 + i x (x^2 - 1)"),
    _entry("f10", lambda x: _sq(x) - 1, h3, _H3_BP, RootSpec((0, 1), ((1.0, 1, 1),)), "x^2 - 1 + i h3"),
    _entry("f11", lambda x: _sq(x) * np.sin(x) ** 2 + 1, lambda x: np.sin(x) * _sq(x), (), _NONE,
           "x^2 sin^2 x + 1 + i x^2 sin x"),
    _entry("f12", lambda x: _sq(x) + 1, h1, _H1_BP, _NONE, "x^2 + 1 + i h1"),
    _entry("f13", lambda x: _sq(x) + 1, lambda x: np.asarray(x, dtype=float), (), _NONE, "x^2 + 1 + i x"),
    _entry("f14", lambda x: _sq(x) * (_sq(x) - 1) ** 2, h3, _H3_BP,
           RootSpec((2, 1), ((1.0, 2, 1),), 1, -1), "x^2 (x^2 - 1)^2 + i h3"),
    _entry("h1", _one, h1, _H1_BP, _NONE, "1 + i h1"),
    _entry("h2", _one, h2, _H2_BP, _NONE, "1 + i h2"),
    _entry("h3", _one, h3, _H3_BP, _NONE, "1 + i h3"),
]}
CORPUS["gcar"] = CorpusEntry("gcar", CORPUS["f8"].symbol, _NONE, CORPUS["f8"].description)


def get(name: str) -> CorpusEntry:
    try:
        return CORPUS[name.lower()]
    except KeyError:
        raise UsageError(f"unknown symbol {name!r}; known: {', '.join(sorted(CORPUS))}") from None


_TOEPLITZ_CACHE: dict[tuple[str, int], ToeplitzMatrix] = {}


def toeplitz(name: str, n: int) -> ToeplitzMatrix:
    key = (name.lower(), n)
    if key not in _TOEPLITZ_CACHE:
        _TOEPLITZ_CACHE[key] = ToeplitzMatrix.from_symbol(get(name).symbol, n)
    return _TOEPLITZ_CACHE[key]


def quotient(f, g: TrigPolynomial, delta: float = 1e-6):
    """x -> f(x)/g(x), with removable 0/0 points replaced by the mean at x +- delta."""
    gscale = float(np.max(np.abs(g(sign_grid(256)))))

    def q(x):
        x = np.asarray(x, dtype=float)
        gv = g(x)
        bad = np.abs(gv) <= 1e-10 * gscale
        with np.errstate(divide="ignore", invalid="ignore"):
            out = f(x) / gv
        if np.any(bad):
            xb = x[bad]
            out[bad] = 0.5 * (f(xb - delta) / g(xb - delta) + f(xb + delta) / g(xb + delta))
        return out

    return q


def elimination_poly(entry: CorpusEntry) -> TrigPolynomial:
    """g for the true roots, with signs chosen on the fixed sign grid."""
    g = build_elimination_poly(entry.roots)
    if entry.roots.is_empty:
        return g
    x = sign_grid()
    s1, s2 = choose_signs(x, entry.symbol(x), g, entry.roots.locations())
    return g.with_signs(s1, s2)


def approximant(entry: CorpusEntry, g: TrigPolynomial, d1: int, d2: int, method: str = "remez") -> TrigPolynomial:
    """q approximating f/g: cosine part on [0, pi], sine part on [0, c]."""
    q = quotient(entry.symbol, g)
    c = ODD_CUTOFF if entry.symbol.jumps_at_pi() else PI
    re = lambda x: q(x).real
    im = lambda x: q(x).imag
    if method == "remez":
        q1 = remez(re, d1, "even", (0.0, PI)).poly
        q2 = remez(im, d2, "odd", (0.0, c)).poly
    elif method == "interp":
        q1 = interpolate(re, d1, "even")
        q2 = interpolate(im, d2, "odd", (0.0, c))
    else:
        raise UsageError(f"unknown approximation method {method!r}")
    return TrigPolynomial(q1.even, q2.odd)


def band_poly(name: str, kind: str = "remez", d1: int = 4, d2: int = 4) -> TrigPolynomial:
    """p = g q for kind 'remez' or 'interp'; p = g for kind 'band'."""
    entry = get(name)
    g = elimination_poly(entry)
    if kind == "band":
        return g
    return g * approximant(entry, g, d1, d2, kind)


def preconditioner(name: str, n: int, kind: str, d1: int = 4, d2: int = 4):
    """Known-symbol preconditioners: none, band, remez, interp, strang, optimal, circ, band-circ."""
    entry = get(name)
    if kind == "none":
        return None
    if kind in ("band", "remez", "interp"):
        return BandPreconditioner(band_poly(name, kind, d1, d2), n)
    if kind == "strang":
        return circulant_strang(toeplitz(name, n))
    if kind == "optimal":
        return circulant_optimal(toeplitz(name, n))
    theta = wrap_angle(circulant_nodes(n))
    values = entry.symbol(theta)
    if kind == "circ":
        return CirculantPreconditioner(_symmetrize(values))
    if kind == "band-circ":
        return band_times_circulant(_symmetrize(values), elimination_poly(entry), n)
    raise UsageError(f"unknown preconditioner {kind!r}")


def _symmetrize(values: np.ndarray) -> np.ndarray:
    # theta = pi is its own mirror; a jump there leaves a half-sum imaginary part
    n = values.size
    return 0.5 * (values + np.conj(values[(-np.arange(n)) % n]))


def ratio_samples(name: str, p: TrigPolynomial, samples: int = 100_001) -> np.ndarray:
    """f/p on a uniform scan of [-pi, pi], dropping the 0/0 points."""
    x = np.linspace(-PI, PI, samples)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = get(name).symbol(x) / p(x)
    return r[np.isfinite(r)]


def ratio_rectangle(name: str, p: TrigPolynomial, margin: float = 0.01, samples: int = 100_001):
    """[min Re, max Re] x [-max|Im|, max|Im|] of f/p, widened by ``margin``; returns (lo, hi, half_height)."""
    r = ratio_samples(name, p, samples)
    return float(r.real.min()) - margin, float(r.real.max()) + margin, float(np.abs(r.imag).max()) + margin


def approximation_bounds(name: str, d1: int, d2: int, samples: int = 20_001) -> tuple[float, float]:
    """(M, eps) for the Remez quotient q of f/g: M = max 1/|q|, eps = hypot of the two part errors.

    The odd-part error is measured on [0, c] like the fit itself.
    """
    entry = get(name)
    g = elimination_poly(entry)
    q = approximant(entry, g, d1, d2)
    target = quotient(entry.symbol, g)
    x = np.linspace(0.0, PI, samples)
    c = ODD_CUTOFF if entry.symbol.jumps_at_pi() else PI
    xo = x[x <= c]
    e1 = float(np.max(np.abs(target(x).real - q(x).real)))
    e2 = float(np.max(np.abs(target(xo).imag - q(xo).imag)))
    return float(1.0 / np.min(np.abs(q(np.linspace(-PI, PI, 2 * samples - 1))))), float(np.hypot(e1, e2))
