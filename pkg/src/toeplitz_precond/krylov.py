"""Left-preconditioned GMRES and CG on the normal equations.

Both solvers can stop on either the preconditioned residual
``||M^{-1}(b - A x_k)|| / ||M^{-1}(b - A x_0)||`` (the default) or on the true
residual ``||b - A x_k|| / ||b - A x_0||``.  Both histories are always recorded.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConvergenceError, NumericError, UsageError

Operator = Callable[[np.ndarray], np.ndarray]


class BreakdownError(ConvergenceError):
    """The Krylov recurrence broke down before reaching the tolerance."""


@dataclass(frozen=True)
class SolveConfig:
    tol: float = 1e-6
    max_iters: int | None = None
    method: str = "gmres"
    residual_mode: str = "preconditioned"

    def __post_init__(self):
        if not 0 < self.tol < 1:
            raise UsageError("tol must lie in (0, 1)")
        if self.max_iters is not None and self.max_iters < 1:
            raise UsageError("max_iters must be positive")
        if self.method not in ("gmres", "cgn"):
            raise UsageError(f"unknown method {self.method!r}")
        if self.residual_mode not in ("true", "preconditioned"):
            raise UsageError(f"unknown residual mode {self.residual_mode!r}")

    def limit(self, n: int) -> int:
        return n if self.max_iters is None else self.max_iters


@dataclass
class SolveReport:
    """Iteration count, residual histories and the iterate.

    ``residual_history`` holds the monitored quantity (the one compared with
    the tolerance) and ``true_history`` the relative true residual; index 0
    belongs to the starting guess.  ``error_inf`` is ``max|x - 1|`` when the
    exact solution is the all-ones vector.
    """

    iterations: int
    residual_history: list[float]
    converged: bool
    solution: np.ndarray
    wall_seconds: float = 0.0
    method: str = "gmres"
    true_history: list[float] = field(default_factory=list)
    error_inf: float | None = None

    def count_label(self, limit: int | None = None) -> str:
        """Table form: the count, or ``>limit`` when not converged."""
        return str(self.iterations) if self.converged else f">{limit or self.iterations}"


def _forward(op) -> Operator:
    if op is None:
        return lambda v: np.array(v, dtype=float)
    if hasattr(op, "apply_inverse"):
        return lambda v: op.apply_inverse(v, False)
    if hasattr(op, "matvec"):
        return op.matvec
    return op


def _backward(op) -> Operator:
    if op is None:
        return lambda v: np.array(v, dtype=float)
    if hasattr(op, "apply_inverse"):
        return lambda v: op.apply_inverse(v, True)
    if hasattr(op, "rmatvec"):
        return op.rmatvec
    raise UsageError("operator has no transpose; pass it explicitly")


def _check_finite(*xs) -> None:
    for x in xs:
        if not np.all(np.isfinite(x)):
            raise NumericError("non-finite value in the recurrence")


def _report(k, converged, x, t0, method, true_hist, prec_hist, mode) -> SolveReport:
    monitored = prec_hist if mode == "preconditioned" else true_hist
    return SolveReport(k, list(monitored), converged, x, time.perf_counter() - t0, method, list(true_hist))


def pgmres(A, Minv, b, x0=None, cfg: SolveConfig | None = None) -> SolveReport:
    """Full GMRES on M^{-1} A x = M^{-1} b (modified Gram-Schmidt, Givens rotations).

    ``A`` is a callable or has ``matvec``; ``Minv`` is a callable, a
    preconditioner (``apply_inverse``) or None.  The iterate is formed after
    every step so that the true residual is available alongside the
    preconditioned one.
    """
    cfg = cfg or SolveConfig()
    t0 = time.perf_counter()
    matvec, prec = _forward(A), _forward(Minv)
    b = np.asarray(b, dtype=float)
    n = b.size
    x0 = np.zeros(n) if x0 is None else np.asarray(x0, dtype=float).copy()
    limit = cfg.limit(n)
    mode = cfg.residual_mode

    r0 = b - matvec(x0)
    rnorm0 = float(np.linalg.norm(r0))
    if rnorm0 == 0.0:
        return _report(0, True, x0, t0, "gmres", [0.0], [0.0], mode)
    z = prec(r0)
    beta = float(np.linalg.norm(z))
    _check_finite(z)
    if beta == 0.0:
        raise BreakdownError("preconditioned residual vanished")

    m = min(limit, n) + 1
    V = np.zeros((m, n))
    AV = np.zeros((m, n))
    H = np.zeros((m + 1, m))
    cs, sn = np.zeros(m), np.zeros(m)
    gvec = np.zeros(m + 1)
    gvec[0] = beta
    V[0] = z / beta
    true_hist, prec_hist = [1.0], [1.0]
    x = x0
    for k in range(limit):
        av = matvec(V[k])
        w = prec(av)
        _check_finite(w)
        AV[k] = av
        for j in range(k + 1):
            H[j, k] = V[j] @ w
            w = w - H[j, k] * V[j]
        hnext = float(np.linalg.norm(w))
        H[k + 1, k] = hnext
        for j in range(k):
            a, c = H[j, k], H[j + 1, k]
            H[j, k] = cs[j] * a + sn[j] * c
            H[j + 1, k] = -sn[j] * a + cs[j] * c
        a, c = H[k, k], H[k + 1, k]
        rho = np.hypot(a, c)
        if rho == 0.0:
            raise BreakdownError("singular Hessenberg matrix")
        cs[k], sn[k] = a / rho, c / rho
        H[k, k], H[k + 1, k] = rho, 0.0
        gvec[k + 1] = -sn[k] * gvec[k]
        gvec[k] = cs[k] * gvec[k]

        y = _back_substitute(H[: k + 1, : k + 1], gvec[: k + 1])
        x = x0 + y @ V[: k + 1]
        rel = float(np.linalg.norm(r0 - y @ AV[: k + 1])) / rnorm0
        _check_finite(rel)
        true_hist.append(rel)
        prec_hist.append(abs(gvec[k + 1]) / beta)
        monitored = prec_hist[-1] if mode == "preconditioned" else rel
        if monitored <= cfg.tol:
            return _report(k + 1, True, x, t0, "gmres", true_hist, prec_hist, mode)
        if hnext <= 1e-14 * beta:
            if rel <= cfg.tol:
                return _report(k + 1, True, x, t0, "gmres", true_hist, prec_hist, mode)
            raise BreakdownError(f"Arnoldi breakdown at step {k + 1} with residual {monitored:.3e}")
        if k + 1 < m:
            V[k + 1] = w / hnext
    return _report(limit, False, x, t0, "gmres", true_hist, prec_hist, mode)


def _back_substitute(R: np.ndarray, g: np.ndarray) -> np.ndarray:
    k = g.size
    y = np.zeros(k)
    for i in range(k - 1, -1, -1):
        y[i] = (g[i] - R[i, i + 1:] @ y[i + 1:]) / R[i, i]
    return y


def pcgn(A, AT, Minv, MinvT, b, x0=None, cfg: SolveConfig | None = None) -> SolveReport:
    """CG on (M^{-1}A)^T (M^{-1}A) x = (M^{-1}A)^T M^{-1} b in CGNR form.

    ``AT`` and ``MinvT`` may be None when ``A`` has ``rmatvec`` and ``Minv``
    is a preconditioner object (or None).
    """
    cfg = cfg or SolveConfig(method="cgn")
    t0 = time.perf_counter()
    matvec, prec = _forward(A), _forward(Minv)
    rmatvec = _forward(AT) if AT is not None else _backward(A)
    precT = _forward(MinvT) if MinvT is not None else _backward(Minv)
    b = np.asarray(b, dtype=float)
    n = b.size
    x = np.zeros(n) if x0 is None else np.asarray(x0, dtype=float).copy()
    limit = cfg.limit(n)
    mode = cfg.residual_mode

    r = b - matvec(x)
    rnorm0 = float(np.linalg.norm(r))
    if rnorm0 == 0.0:
        return _report(0, True, x, t0, "cgn", [0.0], [0.0], mode)
    rhat = prec(r)
    rhat0 = float(np.linalg.norm(rhat))
    _check_finite(rhat)
    if rhat0 == 0.0:
        raise BreakdownError("preconditioned residual vanished")
    true_hist, prec_hist = [1.0], [1.0]
    z = rmatvec(precT(rhat))
    p = z.copy()
    zz = float(z @ z)
    for k in range(limit):
        ap = matvec(p)
        w = prec(ap)
        ww = float(w @ w)
        _check_finite(ww, zz)
        if ww == 0.0:
            raise BreakdownError("zero curvature along the search direction")
        alpha = zz / ww
        x = x + alpha * p
        r = r - alpha * ap
        rhat = rhat - alpha * w
        true_hist.append(float(np.linalg.norm(r)) / rnorm0)
        prec_hist.append(float(np.linalg.norm(rhat)) / rhat0)
        monitored = prec_hist[-1] if mode == "preconditioned" else true_hist[-1]
        if monitored <= cfg.tol:
            return _report(k + 1, True, x, t0, "cgn", true_hist, prec_hist, mode)
        z = rmatvec(precT(rhat))
        zz_new = float(z @ z)
        if zz_new == 0.0:
            raise BreakdownError("normal-equation residual vanished before the tolerance")
        p = z + (zz_new / zz) * p
        zz = zz_new
    return _report(limit, False, x, t0, "cgn", true_hist, prec_hist, mode)


def experiment(T, M=None, cfg: SolveConfig | None = None, rhs: str = "ones-solution") -> SolveReport:
    """Run the standard experiment: x0 = 0 and b = T 1 (or b = 1 with ``rhs='ones'``).

    With the default right-hand side the exact solution is the all-ones
    vector and ``error_inf`` records ``max|x - 1|``.
    """
    cfg = cfg or SolveConfig()
    ones = np.ones(T.n)
    if rhs == "ones-solution":
        b = T.matvec(ones)
    elif rhs == "ones":
        b = ones
    else:
        raise UsageError(f"unknown right-hand side {rhs!r}")
    if cfg.method == "gmres":
        rep = pgmres(T, M, b, None, cfg)
    else:
        rep = pcgn(T, None, M, None, b, None, cfg)
    if rhs == "ones-solution":
        rep.error_inf = float(np.max(np.abs(rep.solution - 1.0)))
    return rep
