"""Command-line front end: solve, table, spectrum, estimate.

Exit codes: 0 success, 1 numeric failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys

from . import corpus, spectra
from .core import load_matrix_file
from .errors import ToeplitzError, UsageError
from .estimate import analyze
from .experiments import (MAX_ITERS, PRECOND_KINDS, ROW_HEADER, TABLE_HEADER, Run, execute, make_preconditioner,
                          run_table, table_ids)

EXIT_OK, EXIT_NUMERIC, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _degrees(text: str) -> tuple[int, int]:
    try:
        d1, d2 = (int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected two integers like 4,4") from None
    if d1 < 0 or d2 < 0:
        raise argparse.ArgumentTypeError("degrees must be non-negative")
    return d1, d2


def _sizes(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma-separated integers") from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="toeplitz-precond", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="run one preconditioned solve and print a CSV row")
    s.add_argument("--symbol", required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--precond", choices=PRECOND_KINDS, default="none")
    s.add_argument("--deg", type=_degrees, default=(4, 4), help="d1,d2 for remez/interp/auto-band")
    s.add_argument("--method", choices=("gmres", "cgn"), default="gmres")
    s.add_argument("--tol", type=float, default=1e-6)
    s.add_argument("--max-iters", type=int, default=MAX_ITERS)
    s.add_argument("--rhs", choices=("ones-solution", "ones"), default="ones-solution")
    s.add_argument("--csv", help="also append the row to this file (header written if new)")
    s.add_argument("--timing", action="store_true", help="fill the wall_s column")

    t = sub.add_parser("table", help="reproduce a published iteration table")
    t.add_argument("--table", required=True, help="table id; 'list' prints the known ids")
    t.add_argument("--out", help="output path (default stdout)")
    t.add_argument("--format", choices=("csv", "markdown"), default="csv")
    t.add_argument("--sizes", type=_sizes, help="restrict to these n")
    t.add_argument("--timing", action="store_true")

    sp = sub.add_parser("spectrum", help="write eigenvalues or singular values of M^-1 T")
    sp.add_argument("--symbol", required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--precond", choices=PRECOND_KINDS, default="none")
    sp.add_argument("--deg", type=_degrees, default=(4, 4))
    sp.add_argument("--what", choices=("eig", "sv"), default="eig")
    sp.add_argument("--out", required=True)

    e = sub.add_parser("estimate", help="estimate roots and multiplicities from the matrix entries")
    src = e.add_mutually_exclusive_group(required=True)
    src.add_argument("--symbol")
    src.add_argument("--matrix-file")
    e.add_argument("--n", type=int)
    e.add_argument("--grid", choices=("band", "circ"), default="band")
    e.add_argument("--power-iters", type=int, default=4)
    return p


def _write_rows(rows: list[dict], header: list[str], stream) -> None:
    w = csv.DictWriter(stream, fieldnames=header, lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    w.writerows(rows)


def _markdown(rows: list[dict], header: list[str]) -> str:
    lines = ["| " + " | ".join(header) + " |", "|" + "---|" * len(header)]
    lines += ["| " + " | ".join(str(r[h]) for h in header) + " |" for r in rows]
    return "\n".join(lines) + "\n"


def _check_n(n: int) -> None:
    if n < 1:
        raise UsageError("--n must be positive")


def cmd_solve(args, out) -> int:
    _check_n(args.n)
    corpus.get(args.symbol)
    if args.max_iters < 1 or not 0 < args.tol < 1:
        raise UsageError("--max-iters must be positive and --tol in (0, 1)")
    run = Run(args.symbol.lower(), args.n, args.precond, args.method, *args.deg, args.tol, args.max_iters, args.rhs)
    row = execute(run, args.timing)
    buf = io.StringIO()
    _write_rows([row], ROW_HEADER, buf)
    out.write(buf.getvalue())
    if args.csv:
        try:
            with open(args.csv) as fh:
                fresh = fh.read(1) == ""
        except FileNotFoundError:
            fresh = True
        with open(args.csv, "a", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=ROW_HEADER, lineterminator="\n")
            if fresh:
                w.writeheader()
            w.writerow(row)
    if row["converged"].startswith("error:"):
        kind = row["converged"][6:]
        print(f"solve failed: {kind}", file=sys.stderr)
        return EXIT_USAGE if kind == "UsageError" else EXIT_NUMERIC
    return EXIT_OK


def cmd_table(args, out) -> int:
    if args.table == "list":
        out.write("\n".join(table_ids()) + "\n")
        return EXIT_OK
    rows = run_table(args.table, args.sizes, args.timing)
    text = _markdown(rows, TABLE_HEADER) if args.format == "markdown" else None
    if text is None:
        buf = io.StringIO()
        _write_rows(rows, TABLE_HEADER, buf)
        text = buf.getvalue()
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        out.write(text)
    failed = [r for r in rows if str(r["converged"]).startswith("error:")]
    return EXIT_NUMERIC if failed else EXIT_OK


def cmd_spectrum(args, out) -> int:
    _check_n(args.n)
    if args.n > spectra.DENSE_CAP:
        raise UsageError(f"--n must be at most {spectra.DENSE_CAP} for dense spectra")
    T = corpus.toeplitz(args.symbol, args.n)
    M = make_preconditioner(T, args.precond, args.symbol.lower(), *args.deg)
    A = spectra.materialize_preconditioned(T, M)
    values = spectra.eigenvalues(A) if args.what == "eig" else spectra.singular_values(A)
    spectra.export_spectrum(values, args.out)
    out.write(f"wrote {len(values)} values to {args.out}\n")
    return EXIT_OK


def cmd_estimate(args, out) -> int:
    if args.matrix_file:
        T = load_matrix_file(args.matrix_file)
        if args.n is not None and args.n != T.n:
            raise UsageError(f"--n {args.n} disagrees with the file's n={T.n}")
    else:
        if args.n is None:
            raise UsageError("--n is required with --symbol")
        _check_n(args.n)
        T = corpus.toeplitz(args.symbol, args.n)
    rep = analyze(T, args.grid, power_iters=args.power_iters)
    out.write("\n".join(rep.lines()) + "\n")
    return EXIT_OK


COMMANDS = {"solve": cmd_solve, "table": cmd_table, "spectrum": cmd_spectrum, "estimate": cmd_estimate}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ToeplitzError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
