import io

import numpy as np
import pytest

from toeplitz_precond import corpus
from toeplitz_precond.cli import EXIT_NUMERIC, EXIT_OK, EXIT_USAGE, main
from toeplitz_precond.core import ToeplitzMatrix, save_matrix_file
from toeplitz_precond.experiments import ROW_HEADER, table_ids


def run(*argv):
    out = io.StringIO()
    rc = main(list(argv), out)
    return rc, out.getvalue()


def row(text):
    header, values = text.strip().splitlines()
    assert header.split(",") == ROW_HEADER
    return dict(zip(ROW_HEADER, values.split(",")))


def test_solve_band_f3():
    rc, text = run("solve", "--symbol", "f3", "--n", "256", "--precond", "band", "--method", "gmres")
    assert rc == EXIT_OK
    r = row(text)
    assert r["iterations"] == "11" and r["converged"] == "true" and r["wall_s"] == ""


def test_solve_circulant_f1():
    rc, text = run("solve", "--symbol", "f1", "--n", "2048", "--precond", "circ")
    assert rc == EXIT_OK and row(text)["iterations"] == "4"


def test_solve_unpreconditioned_hits_the_limit():
    rc, text = run("solve", "--symbol", "f2", "--n", "1024", "--precond", "none")
    r = row(text)
    assert rc == EXIT_OK
    assert (r["iterations"], r["converged"]) == ("500", "false")


def test_solve_timing_and_csv(tmp_path):
    path = tmp_path / "rows.csv"
    for _ in range(2):
        rc, text = run("solve", "--symbol", "f3", "--n", "64", "--precond", "remez", "--deg", "4,4",
                       "--timing", "--csv", str(path))
        assert rc == EXIT_OK
        assert float(row(text)["wall_s"]) >= 0
    lines = path.read_text().splitlines()
    assert lines[0] == ",".join(ROW_HEADER) and len(lines) == 3


@pytest.mark.parametrize("argv", [
    ("solve", "--symbol", "nope", "--n", "8"),
    ("solve", "--symbol", "f2", "--n", "8", "--bogus"),
    ("solve", "--symbol", "f2", "--n", "0"),
    ("solve", "--symbol", "f2", "--n", "8", "--deg", "4"),
    ("solve", "--symbol", "f2", "--n", "8", "--tol", "2"),
    ("solve", "--symbol", "f2", "--n", "8", "--precond", "magic"),
    ("table", "--table", "no-such-table"),
    ("spectrum", "--symbol", "f1", "--n", "2000", "--out", "x.csv"),
    ("estimate", "--symbol", "f2"),
    ("estimate", "--symbol", "f2", "--n", "4096", "--grid", "hex"),
    (),
])
def test_usage_errors_exit_2(argv, capsys):
    rc, _ = run(*argv)
    assert rc == EXIT_USAGE
    assert "usage error" in capsys.readouterr().err


def test_numeric_failure_exits_1(capsys):
    # the circulant sampled from x^2 + i x^3 has a zero eigenvalue
    rc, text = run("solve", "--symbol", "f2", "--n", "64", "--precond", "circ")
    assert rc == EXIT_NUMERIC
    assert row(text)["converged"] == "error:SingularError"
    assert "SingularError" in capsys.readouterr().err


def test_missing_matrix_file_exits_1(tmp_path):
    rc, _ = run("estimate", "--matrix-file", str(tmp_path / "missing.txt"))
    assert rc == EXIT_NUMERIC


def test_estimate_f2():
    rc, text = run("estimate", "--symbol", "f2", "--n", "2048")
    assert rc == EXIT_OK
    assert "root x=0.000000 parts=re+im" in text
    assert "multiplicity part=1 x=0.000000 lambda=(0.0351348 0.00919622 0.00235334) log2s=1.9224 m=2" in text
    assert "log2s=2.6634 m=3" in text


def test_estimate_f9_circulant_grid():
    rc, text = run("estimate", "--symbol", "f9", "--n", "2048", "--grid", "circ")
    assert rc == EXIT_OK
    assert "root x=1.000155 parts=re+im" in text
    assert "multiplicity part=1 x=1.000155" in text and "log2s=1.6781 m=2" in text
    assert "multiplicity part=2 x=0.000000" in text and "log2s=0.8830 m=1" in text
    assert "log2s=0.8954 m=1" in text


def test_estimate_identity_has_no_roots(tmp_path):
    path = tmp_path / "eye.txt"
    save_matrix_file(ToeplitzMatrix(np.eye(1, 127, 63).ravel()), path)
    rc, text = run("estimate", "--matrix-file", str(path))
    assert rc == EXIT_OK and "no roots detected" in text
    rc, _ = run("estimate", "--matrix-file", str(path), "--n", "65")
    assert rc == EXIT_USAGE


def test_estimate_matrix_file_matches_symbol(tmp_path):
    path = tmp_path / "f3.txt"
    save_matrix_file(corpus.toeplitz("f3", 512), path)
    a = run("estimate", "--matrix-file", str(path))
    b = run("estimate", "--symbol", "f3", "--n", "512")
    assert a == b


def test_table_list():
    rc, text = run("table", "--table", "list")
    assert rc == EXIT_OK and text.split() == table_ids()


def test_table_restricted_sizes(tmp_path):
    out = tmp_path / "t.md"
    rc, _ = run("table", "--table", "gcar-circ", "--sizes", "128", "--format", "markdown", "--out", str(out))
    assert rc == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0].startswith("| table | n | column |") and len(lines) > 2
    assert all("| 128 |" in ln for ln in lines[2:])


def test_spectrum_identity(tmp_path):
    out = tmp_path / "sv.csv"
    rc, text = run("spectrum", "--symbol", "f13", "--n", "32", "--precond", "none", "--what", "sv", "--out", str(out))
    assert rc == EXIT_OK and "wrote 32 values" in text
    body = out.read_text().splitlines()
    assert body[0] == "sigma" and len(body) == 33
    rc, _ = run("spectrum", "--symbol", "f13", "--n", "32", "--precond", "optimal", "--out", str(tmp_path / "e.csv"))
    assert rc == EXIT_OK
    assert (tmp_path / "e.csv").read_text().startswith("re,im\n")


def test_repeated_invocations_are_byte_identical(tmp_path):
    outs = [run("table", "--table", "f3-band", "--sizes", "256")[1] for _ in range(2)]
    assert outs[0] == outs[1]
    files = []
    for i in range(2):
        p = tmp_path / f"s{i}.csv"
        run("spectrum", "--symbol", "f1", "--n", "64", "--precond", "circ", "--out", str(p))
        files.append(p.read_bytes())
    assert files[0] == files[1]
