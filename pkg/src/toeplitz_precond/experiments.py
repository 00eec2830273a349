"""Named experiment grids, the preconditioner factory and the reference values they are compared with."""

from __future__ import annotations

import csv
import os
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from importlib import resources

import numpy as np

from . import corpus, spectra
from .core import ToeplitzMatrix
from .errors import ToeplitzError, UsageError
from .estimate import auto_band_preconditioner, auto_circulant_preconditioner
from .krylov import SolveConfig, experiment
from .precond import BandPreconditioner, circulant_optimal, circulant_strang

PRECOND_KINDS = ("none", "band", "remez", "interp", "strang", "optimal", "circ", "band-circ",
                 "auto-band", "auto-circ")
MAX_ITERS = 500
WORKERS_ENV = "TOEPLITZ_PRECOND_WORKERS"
ROW_HEADER = ["symbol", "n", "precond", "method", "iterations", "converged", "final_relres", "wall_s"]
TABLE_HEADER = ["table", "n", "column"] + ROW_HEADER + ["paper_value", "delta"]


def make_preconditioner(T: ToeplitzMatrix, kind: str, symbol: str | None = None, d1: int = 4, d2: int = 4):
    """Preconditioner of the given kind; symbol-based kinds need a corpus ``symbol``."""
    if kind not in PRECOND_KINDS:
        raise UsageError(f"unknown preconditioner {kind!r}; choose from {', '.join(PRECOND_KINDS)}")
    if kind == "none":
        return None
    if kind == "strang":
        return circulant_strang(T)
    if kind == "optimal":
        return circulant_optimal(T)
    if kind == "auto-band":
        return auto_band_preconditioner(T, d1, d2)
    if kind == "auto-circ":
        return auto_circulant_preconditioner(T)
    if symbol is None:
        raise UsageError(f"preconditioner {kind!r} needs a known symbol")
    if kind in ("band", "remez", "interp"):
        return BandPreconditioner(corpus.band_poly(symbol, kind, d1, d2), T.n)
    return corpus.preconditioner(symbol, T.n, kind, d1, d2)


@dataclass(frozen=True)
class Run:
    symbol: str
    n: int
    kind: str
    method: str = "gmres"
    d1: int = 4
    d2: int = 4
    tol: float = 1e-6
    max_iters: int = MAX_ITERS
    rhs: str = "ones-solution"

    @property
    def label(self) -> str:
        if self.kind in ("remez", "interp", "auto-band"):
            return f"{self.kind}-{self.d1}-{self.d2}"
        return self.kind


def execute(run: Run, timing: bool = False) -> dict:
    """One solve; failures are reported in the row rather than raised."""
    row = {"symbol": run.symbol, "n": run.n, "precond": run.label, "method": run.method,
           "iterations": "", "converged": "", "final_relres": "", "wall_s": ""}
    try:
        T = corpus.toeplitz(run.symbol, run.n)
        if run.method == "svout":
            row.update(_svout(T, run))
            return row
        M = make_preconditioner(T, run.kind, run.symbol, run.d1, run.d2)
        cfg = SolveConfig(tol=run.tol, max_iters=run.max_iters, method=run.method)
        rep = experiment(T, M, cfg, rhs=run.rhs)
    except ToeplitzError as exc:
        row["converged"] = f"error:{type(exc).__name__}"
        return row
    row.update(iterations=rep.iterations, converged=str(rep.converged).lower(),
               final_relres=format(rep.residual_history[-1], ".6e"))
    if timing:
        row["wall_s"] = format(rep.wall_seconds, ".4f")
    return row


def _svout(T: ToeplitzMatrix, run: Run) -> dict:
    """Singular values of the preconditioned matrix outside [1 - M eps, 1 + M eps]."""
    if T.n > spectra.DENSE_CAP:
        return {"converged": "skipped"}
    M = make_preconditioner(T, run.kind, run.symbol, run.d1, run.d2)
    s = spectra.singular_values(spectra.materialize_preconditioned(T, M))
    m, eps = corpus.approximation_bounds(run.symbol, run.d1, run.d2)
    stats = spectra.cluster_stats(s, spectra.Interval(1 - m * eps, 1 + m * eps))
    return {"iterations": stats.outside, "converged": "true", "final_relres": format(m * eps, ".6e")}


_COLUMN = re.compile(r"^(gmres|cgn|svout):(auto-)?(none|B|C|BC|optimal|R|In)(\d*)$")


def parse_column(column: str) -> tuple[str, str, int, int]:
    """'gmres:R86' -> ('gmres', 'remez', 8, 6); 'cgn:auto-BC' -> ('cgn', 'auto-circ', 4, 4)."""
    m = _COLUMN.match(column)
    if not m:
        raise UsageError(f"bad column label {column!r}")
    method, auto, base, digits = m.groups()
    d1 = d2 = 4
    if digits:
        half = len(digits) // 2
        d1, d2 = int(digits[:half]), int(digits[half:])
    if auto:
        kind = "auto-band" if base == "R" else "auto-circ"
    else:
        kind = {"none": "none", "B": "band", "C": "circ", "BC": "band-circ", "optimal": "optimal",
                "R": "remez", "In": "interp"}[base]
    return method, kind, d1, d2


def load_reference() -> dict[str, dict[tuple[int, str], str]]:
    """table id -> {(n, column): published value}."""
    out: dict[str, dict[tuple[int, str], str]] = {}
    with resources.files(__package__).joinpath("data/reference_values.csv").open() as fh:
        for rec in csv.DictReader(fh):
            out.setdefault(rec["table"], {})[(int(rec["n"]), rec["column"])] = rec["value"]
    return out


def table_ids() -> list[str]:
    return list(load_reference())


def _table_settings(table: str) -> tuple[str, float, str]:
    symbol = table.split("-")[0]
    tol = 1e-7 if symbol in ("f9", "f14") else 1e-6
    rhs = "ones" if symbol == "gcar" else "ones-solution"
    return symbol, tol, rhs


def table_runs(table: str, sizes: list[int] | None = None) -> list[tuple[int, str, Run]]:
    ref = load_reference()
    if table not in ref:
        raise UsageError(f"unknown table {table!r}; known: {', '.join(ref)}")
    symbol, tol, rhs = _table_settings(table)
    keys = sorted(ref[table], key=lambda k: (k[0], list(ref[table]).index(k)))
    if sizes:
        keys = [k for k in keys if k[0] in sizes]
    runs = []
    for n, column in keys:
        method, kind, d1, d2 = parse_column(column)
        runs.append((n, column, Run(symbol, n, kind, method, d1, d2, tol, MAX_ITERS, rhs)))
    return runs


def _delta(row: dict, paper: str) -> str:
    if not isinstance(row["iterations"], (int, np.integer)) or row["converged"] not in ("true", "false"):
        return ""
    if paper.startswith(">"):
        return "0" if row["converged"] == "false" else str(row["iterations"] - int(paper[1:]))
    if not paper.lstrip("-").isdigit():
        return ""
    if row["converged"] == "false":
        return ""
    return str(row["iterations"] - int(paper))


def worker_count() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise UsageError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None


def _execute_timed(args):
    run, timing = args
    return execute(run, timing)


def run_table(table: str, sizes: list[int] | None = None, timing: bool = False,
              workers: int | None = None) -> list[dict]:
    """Every run of a named table, in a fixed row order, with the published value and delta."""
    runs = table_runs(table, sizes)
    ref = load_reference()[table]
    workers = worker_count() if workers is None else workers
    jobs = [(r, timing) for _, _, r in runs]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_execute_timed, jobs))
    else:
        results = [_execute_timed(j) for j in jobs]
    rows = []
    for (n, column, _), res in zip(runs, results):
        paper = ref[(n, column)]
        rows.append({"table": table, "n": n, "column": column, **res, "paper_value": paper,
                     "delta": _delta(res, paper)})
    return rows
