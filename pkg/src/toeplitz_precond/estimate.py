"""Preconditioners for a Toeplitz matrix whose symbol is unknown.

The symbol is approximated by the partial Fourier sum
F(x) = sum_{|k|<n} t_k exp(ikx) on an equispaced grid.  Roots of its real and
imaginary parts are located from that sampling, their multiplicities are
read off the decay of the smallest eigenvalue of small Toeplitz sections, and
the resulting elimination polynomial drives either a Remez band
preconditioner or a band-times-circulant one.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.integrate import simpson

from .approx import TrigPolynomial, remez
from .core import ToeplitzMatrix, leading_parts, wrap_angle
from .errors import SingularError, UnreliableEstimateError, UsageError
from .precond import (BandPreconditioner, CirculantPreconditioner, CompositePreconditioner, RootSpec,
                      build_elimination_poly, choose_signs, shift_pole_values)

GRID_KINDS = ("band", "circ")


@dataclass(frozen=True)
class SymbolEstimate:
    """Partial Fourier sum sampled on one of the two grids.

    band: theta_j = -pi + 2 j pi / (n+1), j = 1..n.
    circ: theta_j = 2 (j-1) pi / n, j = 1..n.
    ``endpoint`` is F at -pi (band) or at 0 = 2 pi (circ), the extra node
    used by the Simpson rule.
    """

    grid_kind: str
    theta: np.ndarray
    values: np.ndarray
    endpoint: complex
    diagonals: np.ndarray

    @property
    def n(self) -> int:
        return self.theta.size

    @property
    def h(self) -> float:
        return 2 * np.pi / (self.n + 1) if self.grid_kind == "band" else 2 * np.pi / self.n

    def part(self, ell: int) -> np.ndarray:
        return self.values.real if ell == 1 else self.values.imag

    def at(self, x) -> np.ndarray:
        """F at arbitrary angles by direct summation."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        k = np.arange(-(self.n - 1), self.n)
        return np.exp(1j * np.multiply.outer(x, k)) @ self.diagonals

    def closed_grid(self) -> tuple[np.ndarray, np.ndarray]:
        """Nodes and values with the closing endpoint(s) appended, for quadrature."""
        if self.grid_kind == "band":
            x = np.concatenate(([-np.pi], self.theta, [np.pi]))
            v = np.concatenate(([self.endpoint], self.values, [self.endpoint]))
        else:
            x = np.concatenate((self.theta, [2 * np.pi]))
            v = np.concatenate((self.values, [self.values[0]]))
        return x, v


def fourier_expansion(T: ToeplitzMatrix, grid_kind: str = "band") -> SymbolEstimate:
    """Evaluate F on the grid with one FFT of the folded diagonal sequence."""
    if grid_kind not in GRID_KINDS:
        raise UsageError(f"grid must be one of {GRID_KINDS}")
    n = T.n
    t = T.diagonals
    k = np.arange(-(n - 1), n)
    if grid_kind == "band":
        N = n + 1
        # theta_j = -pi + j h: exp(ik theta_j) = (-1)^k exp(2 pi i k j / N)
        a = np.zeros(N)
        np.add.at(a, k % N, t * np.where(k % 2, -1.0, 1.0))
        full = N * np.fft.ifft(a)
        theta = -np.pi + 2 * np.pi * np.arange(1, n + 1) / N
        return SymbolEstimate("band", theta, full[1:], complex(full[0]), t)
    a = np.zeros(n)
    np.add.at(a, k % n, t)
    full = n * np.fft.ifft(a)
    theta = 2 * np.pi * np.arange(n) / n
    return SymbolEstimate("circ", theta, full, complex(full[0]), t)


@dataclass(frozen=True)
class RootCandidate:
    """Possible root folded into [0, pi); flags say which parts vanish there."""

    location: float
    from_real_part: bool
    from_imag_part: bool
    value_at: complex
    index: int = -1


def _cyclic_mid(i: float, j: float, n: int) -> float:
    """Midpoint of grid positions i and j along the shorter arc (positions mod n)."""
    d = (j - i) % n
    if d > n / 2:
        d -= n
    return (i + d / 2) % n


def _position_to_angle(est: SymbolEstimate, pos: float) -> float:
    if est.grid_kind == "band":
        return float(wrap_angle(-np.pi + (pos + 1) * est.h))
    return float(wrap_angle(pos * est.h))


def _in_intervals(x: float, intervals, pad: float = 0.0) -> bool:
    for a, b in intervals:
        if _arc_distance(x, a, b) <= pad:
            return True
    return False


def _arc_distance(x: float, a: float, b: float) -> float:
    """Distance from angle x to the arc [a, b] (b may exceed pi)."""
    x = float(wrap_angle(x))
    best = np.inf
    for shift in (-2 * np.pi, 0.0, 2 * np.pi):
        y = x + shift
        best = min(best, 0.0 if a <= y <= b else min(abs(y - a), abs(y - b)))
    return best


def _part_candidates(y: np.ndarray, tau: float, est: SymbolEstimate, intervals, cluster: int) -> list[float]:
    """Grid positions (possibly half-integer) of likely zeros of one real part."""
    n = y.size
    a = np.abs(y)
    scale = float(a.max())
    if scale == 0.0:
        return []
    prev, nxt = np.roll(a, 1), np.roll(a, -1)
    # a double root sampled half a step away only reaches about h^2 * scale
    small = a < max(tau, est.h ** 2) * scale
    minima = np.nonzero(small & (a <= prev) & (a <= nxt))[0].astype(float).tolist()
    signs = np.sign(y)
    nxt_sign = np.roll(signs, -1)
    crossings = []
    for i in np.nonzero(signs * nxt_sign < 0)[0]:
        mid_angle = _position_to_angle(est, i + 0.5)
        if intervals and _in_intervals(mid_angle, intervals, pad=est.h):
            continue
        crossings.append(i + 0.5)
    pos = sorted(set(minima + crossings))
    if not pos:
        return []
    # cluster positions closer than ``cluster`` steps (cyclically) and keep the midpoint
    groups = [[pos[0]]]
    for p in pos[1:]:
        if p - groups[-1][-1] <= cluster:
            groups[-1].append(p)
        else:
            groups.append([p])
    if len(groups) > 1 and (groups[0][0] + n) - groups[-1][-1] <= cluster:
        groups[0] = groups.pop() + groups[0]
    return [_cyclic_mid(g[0], g[-1], n) for g in groups]


def detect_discontinuities(est: SymbolEstimate, delta: float = 0.05, parts=(1, 2)) -> list[tuple[float, float]]:
    """Arcs [theta_j, theta_{j+1}] where a forward-difference ratio is Omega(n)."""
    n, h = est.n, est.h
    flagged = np.zeros(n, dtype=bool)
    for ell in parts:
        y = est.part(ell)
        ratio = np.abs(np.roll(y, -1) - y) / h
        thresh = max(10 * float(np.median(ratio)), delta * n)
        flagged |= ratio > thresh
    out = []
    idx = np.nonzero(flagged)[0]
    if idx.size == 0:
        return out
    runs = [[idx[0], idx[0]]]
    for i in idx[1:]:
        if i == runs[-1][1] + 1:
            runs[-1][1] = i
        else:
            runs.append([i, i])
    if len(runs) > 1 and runs[0][0] == 0 and runs[-1][1] == n - 1:
        last = runs.pop()
        runs[0] = [last[0] - n, runs[0][1]]
    for i, j in runs:
        a = _position_to_angle(est, i % n)
        a = a if i >= 0 else _position_to_angle(est, i % n) - 2 * np.pi
        b = a + (j - i + 1) * h
        out.append((a, b))
    return out


def part_discontinuities(est: SymbolEstimate, delta: float = 0.05) -> dict[int, list]:
    return {ell: detect_discontinuities(est, delta, (ell,)) for ell in (1, 2)}


def detect_roots(est: SymbolEstimate, tau: float = 1e-6, merge_steps: float = 3.0,
                 cluster_radius: float = 0.1, delta: float = 0.05) -> list[RootCandidate]:
    """Root candidates of F1 and F2 folded into [0, pi).

    Small local minima of |F^l| (below max(tau, h^2) times its maximum) and sign
    changes outside discontinuity arcs are collected per part, clustered, and
    merged across parts when closer than ``merge_steps`` grid steps.  The
    real-part location wins a merge.  Candidates at pi are dropped: a root
    there is outside the elimination-polynomial form.
    """
    n, h = est.n, est.h
    disc = part_discontinuities(est, delta)
    per_part: dict[int, list[float]] = {}
    scale = float(np.max(np.abs(est.values)))
    if scale == 0.0:
        raise UnreliableEstimateError("the symbol estimate vanishes identically")
    for ell in (1, 2):
        y = est.part(ell)
        if np.max(np.abs(y)) <= 1e-12 * scale:
            # a part that vanishes identically has no isolated roots
            per_part[ell] = []
            continue
        pos = _part_candidates(y, tau, est, disc[ell], max(8, int(np.ceil(cluster_radius / h))))
        angles = []
        for p in pos:
            x = _position_to_angle(est, p)
            if ell == 2 and abs(abs(x) - np.pi) < merge_steps * h:
                # an odd part is forced to 0 at pi only if it is continuous there
                near = np.abs(wrap_angle(est.theta - np.pi)) < 4 * h
                if np.max(np.abs(y[near])) > tau ** 0.5 * np.max(np.abs(y)):
                    continue
            angles.append(abs(x))
        per_part[ell] = _fold_unique(angles, merge_steps * h)
    merged: list[list] = []
    for ell in (1, 2):
        for x in per_part[ell]:
            for m in merged:
                if abs(m[0] - x) <= merge_steps * h:
                    m[ell] = True
                    break
            else:
                merged.append([x, ell == 1, ell == 2])
    out = []
    for x, r, i in sorted(merged):
        if x < merge_steps * h * 0.5 or x < h:
            x = 0.0
        if abs(x - np.pi) < h:
            continue
        idx = int(np.argmin(np.abs(wrap_angle(est.theta - x))))
        out.append(RootCandidate(float(x), bool(r), bool(i), complex(est.at(x)[0]), idx))
    return _dedupe(out, merge_steps * h)


def _fold_unique(angles: list[float], radius: float) -> list[float]:
    out: list[float] = []
    for x in sorted(angles):
        if out and x - out[-1] <= radius:
            # symmetric pair from the two halves of the grid
            out[-1] = out[-1] if out[-1] <= x else x
            continue
        out.append(x)
    return out


def _dedupe(cands: list[RootCandidate], radius: float) -> list[RootCandidate]:
    out: list[RootCandidate] = []
    for c in cands:
        if out and abs(c.location - out[-1].location) <= radius:
            prev = out[-1]
            loc = prev.location if prev.from_real_part or not c.from_real_part else c.location
            out[-1] = RootCandidate(loc, prev.from_real_part or c.from_real_part,
                                    prev.from_imag_part or c.from_imag_part, prev.value_at, prev.index)
        else:
            out.append(c)
    return out


def inverse_power(S: np.ndarray, start: np.ndarray, iters: int = 4, quotient: str = "inverse") -> float:
    """Smallest-magnitude eigenvalue estimate after ``iters`` inverse-power steps.

    ``quotient='inverse'`` returns 1 / |v^H S^{-1} v| from the last step, with v
    the normalized iterate entering it; ``'rayleigh'`` returns |v^H S v| / v^H v
    for the final iterate.  Both tend to the same limit; with few steps the
    first is the one the published multiplicity tables were computed with.
    """
    if quotient not in ("inverse", "rayleigh"):
        raise UsageError("quotient must be 'inverse' or 'rayleigh'")
    if iters < 1:
        raise UsageError("iters must be positive")
    S = np.asarray(S, dtype=float)
    v = np.asarray(start, dtype=complex)
    v = v / np.linalg.norm(v)
    try:
        with warnings.catch_warnings():
            # an exact zero pivot is reported below as SingularError
            warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
            lu = scipy.linalg.lu_factor(S, check_finite=True)
    except (ValueError, scipy.linalg.LinAlgError) as exc:
        raise SingularError(str(exc)) from exc
    if np.any(np.diag(lu[0]) == 0):
        raise SingularError("inverse power: singular matrix")
    mu = 0.0
    for _ in range(iters):
        w = scipy.linalg.lu_solve(lu, v.real) + 1j * scipy.linalg.lu_solve(lu, v.imag)
        mu = abs(np.vdot(v, w))
        nw = np.linalg.norm(w)
        if not np.isfinite(nw) or nw == 0:
            raise SingularError("inverse power: iterate vanished or overflowed")
        v = w / nw
    if quotient == "rayleigh":
        return float(abs(np.vdot(v, S @ v)))
    if mu == 0.0:
        raise SingularError("inverse power: start vector orthogonal to the inverse image")
    return float(1.0 / mu)


def one_signed(y: np.ndarray, tau: float = 1e-6) -> bool:
    scale = float(np.max(np.abs(y)))
    return bool(np.min(y) >= -tau * scale or np.max(y) <= tau * scale)


def abs_symbol_coefficients(est: SymbolEstimate, ell: int, count: int) -> np.ndarray:
    """(1/2pi) int |F^l(x)| cos(mx) dx, m < count, by composite Simpson on the closed grid."""
    x, v = est.closed_grid()
    a = np.abs(v.real if ell == 1 else v.imag)
    m = np.arange(count)
    integrand = a[None, :] * np.cos(np.multiply.outer(m, x))
    return simpson(integrand, x=x, axis=1) / (2 * np.pi)


@dataclass(frozen=True)
class MultiplicityReport:
    part: int
    location: float
    sizes: tuple[int, int, int]
    eigen_estimates: tuple[float, float, float]
    ratio: float
    log2_ratio: float
    multiplicity: int
    branch: str


def _section_matrices(T: ToeplitzMatrix, est: SymbolEstimate, ell: int, sizes, tau: float):
    y = est.part(ell)
    if ell == 1 and one_signed(y, tau):
        return [leading_parts(T, k)[0] for k in sizes], "symmetric"
    c = abs_symbol_coefficients(est, ell, max(sizes))
    return [scipy.linalg.toeplitz(c[:k]) for k in sizes], "simpson"


def estimate_multiplicity(T: ToeplitzMatrix, est: SymbolEstimate, root: RootCandidate | float, part: int,
                          k: int = 16, power_iters: int = 4, tau: float = 1e-6,
                          parity: str | None = None) -> MultiplicityReport:
    """Multiplicity of the root of F^part at ``root`` from lambda_k, lambda_2k, lambda_4k.

    s = (l_k - l_2k) / (l_2k - l_4k) behaves like 2^m.  ``parity`` ('even' or
    'odd') restricts the rounding, which is how a root at 0 is handled.
    """
    if part not in (1, 2):
        raise UsageError("part must be 1 or 2")
    x = root.location if isinstance(root, RootCandidate) else float(root)
    sizes = (k, 2 * k, 4 * k)
    if 4 * k > T.n:
        raise UsageError(f"sections of size {4 * k} exceed n={T.n}")
    mats, branch = _section_matrices(T, est, part, sizes, tau)
    lams = []
    for kk, S in zip(sizes, mats):
        theta = np.exp(1j * x * np.arange(kk)) / np.sqrt(kk)
        lams.append(inverse_power(S, theta, power_iters))
    l1, l2, l3 = lams
    if not l2 - l3 > 0:
        raise UnreliableEstimateError(f"eigenvalue gap not positive at x={x:.4f} (part {part})")
    s = (l1 - l2) / (l2 - l3)
    if not s > 0:
        raise UnreliableEstimateError(f"non-positive ratio at x={x:.4f} (part {part})")
    lg = float(np.log2(s))
    m = int(np.rint(lg))
    if parity == "even" and m % 2:
        m = int(2 * np.rint(lg / 2))
    elif parity == "odd" and m % 2 == 0:
        m = int(2 * np.floor(lg / 2) + 1)
    return MultiplicityReport(part, x, sizes, tuple(lams), float(s), lg, max(m, 0), branch)


@dataclass
class EstimateReport:
    """Everything the automatic pipelines learned about the matrix."""

    estimate: SymbolEstimate
    candidates: list[RootCandidate]
    discontinuities: dict[int, list]
    multiplicities: list[MultiplicityReport] = field(default_factory=list)
    roots: RootSpec = field(default_factory=RootSpec)
    g: TrigPolynomial = field(default_factory=lambda: TrigPolynomial.constant(1.0))

    def lines(self) -> list[str]:
        out = [f"grid={self.estimate.grid_kind} n={self.estimate.n} h={self.estimate.h:.6g}"]
        if not self.candidates:
            out.append("no roots detected")
        for c in self.candidates:
            parts = "+".join(p for p, f in (("re", c.from_real_part), ("im", c.from_imag_part)) if f)
            out.append(f"root x={c.location:.6f} parts={parts} F={c.value_at.real:.6e}{c.value_at.imag:+.6e}i")
        for ell in (1, 2):
            for a, b in self.discontinuities.get(ell, []):
                out.append(f"discontinuity part={ell} [{a:.6f}, {b:.6f}]")
        for r in self.multiplicities:
            lam = " ".join(f"{v:.6g}" for v in r.eigen_estimates)
            out.append(f"multiplicity part={r.part} x={r.location:.6f} lambda=({lam}) "
                       f"log2s={r.log2_ratio:.4f} m={r.multiplicity} via={r.branch}")
        out.append(f"g even={np.round(self.g.even, 12).tolist()} odd={np.round(self.g.odd, 12).tolist()}")
        return out


def analyze(T: ToeplitzMatrix, grid_kind: str = "band", tau: float = 1e-6, power_iters: int = 4,
            k: int = 16, delta: float = 0.05) -> EstimateReport:
    """Expansion, roots, discontinuities, multiplicities and signed elimination polynomial."""
    est = fourier_expansion(T, grid_kind)
    cands = detect_roots(est, tau, delta=delta)
    disc = part_discontinuities(est, delta)
    report = EstimateReport(est, cands, disc)
    if not cands:
        return report
    zero = None
    nonzero = []
    for c in cands:
        ms = [0, 0]
        for ell, flag in ((1, c.from_real_part), (2, c.from_imag_part)):
            if not flag:
                continue
            parity = None if c.location else ("even" if ell == 1 else "odd")
            rep = estimate_multiplicity(T, est, c, ell, k, power_iters, tau, parity)
            report.multiplicities.append(rep)
            # a detected root has positive multiplicity even when the ratio is muddied
            # by a neighbouring root of the same order
            ms[ell - 1] = max(rep.multiplicity, 2 if parity == "even" else 1)
        if c.location == 0.0:
            zero = (ms[0], ms[1])
        elif ms[0] or ms[1]:
            nonzero.append((c.location, ms[0], ms[1]))
    roots = RootSpec(zero, tuple(nonzero))
    g = build_elimination_poly(roots)
    if not roots.is_empty and g.degree > 0:
        s1, s2 = choose_signs(est.theta, est.values, g, roots.locations(), radius=2 * est.h)
        roots = roots.with_signs(s1, s2)
        g = g.with_signs(s1, s2)
    report.roots = roots
    report.g = g
    return report


def _approx_nodes(est: SymbolEstimate, count: int) -> np.ndarray:
    """Indices of ``count`` equispaced grid nodes inside (0, pi)."""
    inside = np.nonzero((est.theta > 0) & (est.theta < np.pi))[0]
    if inside.size <= count:
        return inside
    pick = np.unique(np.rint(np.linspace(0, inside.size - 1, count)).astype(int))
    return inside[pick]


def auto_band_preconditioner(T: ToeplitzMatrix, d1: int = 4, d2: int = 4, nodes: int = 512,
                             root_radius: float = 0.1, disc_radius: float = 2 * np.pi / 7,
                             spike: float = 20.0, power_iters: int = 4, tau: float = 1e-6,
                             report: EstimateReport | None = None) -> BandPreconditioner:
    """Band preconditioner T_n(g_n q) built from the matrix entries alone.

    q is the Remez approximation of F/g_n on grid nodes in (0, pi) that stay
    away from the estimated roots, from discontinuities and from spikes.
    """
    rep = report or analyze(T, "band", tau, power_iters)
    est, g = rep.estimate, rep.g
    idx = _approx_nodes(est, nodes)
    x = est.theta[idx]
    ratio = est.values[idx] / g(x)
    keep = np.ones(x.size, dtype=bool)
    for r in rep.roots.locations():
        keep &= np.abs(x - r) > root_radius
    absr = np.abs(ratio)
    keep &= absr <= spike * float(np.median(absr[keep])) if np.any(keep) else keep
    has_odd = g.odd_degree > 0
    masks = {}
    for ell in (1, 2):
        other = 2 if ell == 1 else 1
        arcs = list(rep.discontinuities[ell]) + (list(rep.discontinuities[other]) if has_odd else [])
        m = keep.copy()
        for a, b in arcs:
            m &= np.array([_arc_distance(xi, a, b) > disc_radius for xi in x])
        masks[ell] = m
    q1 = remez(ratio.real[masks[1]], d1, "even", nodes=x[masks[1]]).poly
    q2 = remez(ratio.imag[masks[2]], d2, "odd", nodes=x[masks[2]]).poly if d2 > 0 else TrigPolynomial()
    q = TrigPolynomial(q1.even, q2.odd)
    P = BandPreconditioner(g * q, T.n)
    P.estimate = rep
    return P


def auto_circulant_preconditioner(T: ToeplitzMatrix, power_iters: int = 4, tau: float = 1e-6,
                                  report: EstimateReport | None = None):
    """C_n(F) when F has no real-part roots shared with the imaginary part, else T_n(g_n) C_n(F/g_n)."""
    rep = report or analyze(T, "circ", tau, power_iters)
    est = rep.estimate
    shared = [c for c in rep.candidates if c.from_real_part and c.from_imag_part]
    if not shared or rep.g.degree == 0:
        P = CirculantPreconditioner(est.values)
        P.estimate = rep
        return P
    g = rep.g
    gv = g(est.theta)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = est.values / gv
    gmax = float(np.max(np.abs(gv)))
    poles = np.abs(gv) <= 1e-10 * gmax
    for r in rep.roots.locations():
        poles |= np.abs(wrap_angle(est.theta - r)) < 0.5 * est.h + 1e-12
        poles |= np.abs(wrap_angle(est.theta + r)) < 0.5 * est.h + 1e-12
    poles |= ~np.isfinite(ratio)
    values = shift_pole_values(ratio, np.nonzero(poles)[0]) if np.any(poles) else ratio
    P = CompositePreconditioner(BandPreconditioner(g, T.n), CirculantPreconditioner(values))
    P.estimate = rep
    return P
