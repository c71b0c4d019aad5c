import subprocess
import sys

import pytest

from invscheme import bench
from invscheme.cli import main


def test_table1_csv(tmp_path):
    out = tmp_path / "t1.csv"
    assert main(["table1", "--out", str(out)]) == 0
    cols, recs = bench.read_csv(out)
    assert cols == ("scheme", "h", "k", "mean_abs_error", "diverged")
    assert len(recs) == 8 and all(r[4] is False for r in recs)


def test_table2_reports_divergence_as_data(tmp_path):
    out = tmp_path / "t2.csv"
    assert main(["table2", "--out", str(out)]) == 0
    cols, recs = bench.read_csv(out)
    assert cols == ("scheme", "x0", "y0", "h", "k", "max_abs_error", "diverged")
    assert ("standard", 0.84) in {(r[0], r[1]) for r in recs if r[6]}


def test_solve_bvp_success(capsys):
    code = main(["solve-bvp", "--scheme", "invariant", "--solution", "secant", "--x0", "1", "--y0", "1",
                 "--h", "0.1", "--k", "0.1"])
    assert code == 0
    assert "mean abs error" in capsys.readouterr().out


def test_solve_bvp_divergence_exit_code(capsys):
    code = main(["solve-bvp", "--x0", "0.84", "--y0", "0.84", "--scheme", "standard", "--h", "0.01", "--k", "0.01"])
    assert code == 2
    assert "diverged" in capsys.readouterr().out


@pytest.mark.parametrize("argv", [
    ["solve-bvp", "--h", "abc"],
    ["solve-bvp", "--bogus"],
    ["solve-bvp", "--h", "-0.1"],
    ["nonsense"],
    [],
    ["solve-bvp", "--forms", "5"],
])
def test_usage_errors(argv, capsys):
    assert main(argv) == 1
    assert "error" in capsys.readouterr().err


def test_singular_domain_is_a_usage_error(capsys):
    assert main(["solve-bvp", "--x0", "0.2", "--y0", "0.2"]) == 1
    assert "singular" in capsys.readouterr().err


def test_solve_ivp_and_dump(tmp_path):
    out = tmp_path / "ivp.csv"
    assert main(["solve-ivp", "--solution", "rational", "--corner", "TR", "--out", str(out)]) == 0
    cols, recs = bench.read_csv(out)
    assert cols == ("x", "y", "u_numeric", "u_exact", "error")
    assert len(recs) == 121
    out = tmp_path / "dump.csv"
    assert main(["dump-solution", "--out", str(out)]) == 0
    _, recs = bench.read_csv(out)
    assert all(r[4] == abs(r[2] - r[3]) for r in recs)


def test_invariance_and_convergence(tmp_path):
    out = tmp_path / "inv.csv"
    assert main(["invariance", "--group", "G2", "--trials", "20", "--out", str(out)]) == 0
    _, recs = bench.read_csv(out)
    assert recs[0][0] == "G2" and recs[0][3] is True and recs[0][5] is True
    out = tmp_path / "conv.csv"
    assert main(["convergence", "--out", str(out)]) == 0
    cols, recs = bench.read_csv(out)
    assert cols[0] == "name" and all(0.8 <= v <= 1.2 for r in recs for v in r[1:-1])


def test_console_entry_point_stdout_is_csv():
    res = subprocess.run([sys.executable, "-m", "invscheme", "table1", "--iterations", "5"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert res.stdout.splitlines()[0] == "scheme,h,k,mean_abs_error,diverged"
    assert "published" in res.stderr
