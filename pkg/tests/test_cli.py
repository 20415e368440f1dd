import csv
import io
import subprocess
import sys

import numpy as np
import pytest

from fdmethod.cli import (
    EXIT_ANALYSIS, EXIT_CONDITION, EXIT_INPUT, EXIT_OK, EXIT_SOLVER, default_columns, main,
)

GOLDEN_HEADER_M3 = (
    "x,u0term,u1term,u2term,u3term,sum0,sum1,sum2,sum3,exact,"
    "delta0,delta1,delta2,delta3,nu0,nu1,nu2,nu3"
)


def run(*argv):
    out = io.StringIO()
    code = main([str(a) for a in argv], stdout=out)
    return code, out.getvalue()


def write(tmp_path, name, text):
    f = tmp_path / name
    f.write_text(text, encoding="utf-8")
    return f


def read_columns(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array(rows[1:], dtype=float)


@pytest.fixture(scope="module")
def ex1_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "ex1.csv"
    code, text = run("solve", "example1", "--m", 3, "--out", path)
    assert code == EXIT_OK
    return path, text


def test_solve_golden_header_and_rows(ex1_csv):
    path, summary = ex1_csv
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().split("\n")
    assert lines[0] == GOLDEN_HEADER_M3
    assert lines[-1] == ""
    assert len(lines) - 2 == 144 * 32 + 1
    header, data = read_columns(path)
    assert data[0, 0] == 0.0 and data[-1, 0] == 48.0
    d = {h: np.max(np.abs(data[:, i])) for i, h in enumerate(header)}
    assert d["delta3"] < d["delta0"]
    assert "sup|delta3|=" in summary and "sup|nu0|=" in summary


def test_solve_to_stdout_is_the_csv(tmp_path):
    f = write(tmp_path, "p.prob", 'N = "-1"\nphi = "0"\nx0 = 0\nu0 = 1\nh = 0.5\nn = 2\nexact = "exp(-x)"\n')
    code, text = run("solve", f, "--m", 0, "--quad", 4)
    assert code == EXIT_OK
    lines = text.splitlines()
    assert lines[0] == "x,u0term,sum0,exact,delta0,nu0"
    assert len(lines) == 1 + 2 * 4 + 1
    assert lines[1].startswith("0,1,1,1,0,")


def test_solve_is_deterministic(tmp_path, ex1_csv):
    again = tmp_path / "again.csv"
    assert run("solve", "example1", "--m", 3, "--out", again)[0] == EXIT_OK
    assert again.read_bytes() == ex1_csv[0].read_bytes()


def test_solve_example2_discrepancy(tmp_path):
    path = tmp_path / "ex2.csv"
    assert run("solve", "example2", "--m", 2, "--out", path)[0] == EXIT_OK
    header, data = read_columns(path)
    assert "exact" not in header and "delta0" not in header
    inside = data[:, 0] > 0
    sup = [np.max(np.abs(data[inside, header.index(f"nu{j}")])) for j in range(3)]
    assert sup[2] < sup[1] < sup[0]
    assert np.isnan(data[0, header.index("nu0")])


def test_solve_with_reference_column(tmp_path):
    f = write(tmp_path, "p.prob", 'N = "-1-u^2"\nphi = "cos(x)"\nx0 = 0\nu0 = 0\nh = 0.5\nn = 2\n')
    code, text = run("solve", f, "--m", 1, "--quad", 4, "--reference")
    assert code == EXIT_OK
    assert text.splitlines()[0] == "x,u0term,u1term,sum0,sum1,reference,delta0,delta1,nu0,nu1"


def test_check_exit_codes(tmp_path):
    code, text = run("check", "example1", "--x-samples", 401, "--u-samples", 401)
    assert code == EXIT_OK
    assert "alpha=1\n" in text and "passed=true" in text
    assert "k=2.126" in text
    bad = write(tmp_path, "bad.prob", 'N = "u"\nphi = "1"\nx0 = 0\nu0 = 0\nh = 0.5\nn = 2\n')
    code, text = run("check", bad, "--x-samples", 51, "--u-samples", 51)
    assert code == EXIT_CONDITION and "condition3: FAIL" in text


def test_parse_error_reports_column(tmp_path, capsys):
    f = write(tmp_path, "p.prob", 'N = "-(1+u^"\nphi = "0"\nx0 = 0\nu0 = 0\nh = 1\nn = 1\n')
    assert run("check", f)[0] == EXIT_INPUT
    err = capsys.readouterr().err
    assert "column" in err and "p.prob:1" in err
    assert run("solve", tmp_path / "missing.prob")[0] == EXIT_INPUT
    assert run("solve", "example1", "--m", -1)[0] == EXIT_INPUT
    assert run("solve", "example1", "--quad", 3)[0] == EXIT_INPUT


def test_solver_error_exit_code(tmp_path):
    f = write(tmp_path, "p.prob", 'N = "-sqrt(u)"\nphi = "0"\nx0 = 0\nu0 = -1\nh = 0.5\nn = 2\n')
    assert run("solve", f, "--m", 1)[0] == EXIT_SOLVER


def test_adm_window_and_columns(tmp_path):
    path = tmp_path / "adm.csv"
    assert run("adm", "example1", "--m", 3, "--window", 0, 6, "--out", path)[0] == EXIT_OK
    header, data = read_columns(path)
    assert data[:, 0].max() == 6.0
    sup = [np.max(np.abs(data[:, header.index(f"delta{j}")])) for j in range(4)]
    assert sup[3] > sup[0]
    code, text = run("adm", "example1", "--m", 0, "--window", 0, 1)
    assert text.splitlines()[0] == "x,u0term,sum0,exact,delta0,nu0"
    f = write(tmp_path, "p.prob", 'N = "-1-u^2"\nphi = "cos(x)"\nx0 = 0\nu0 = 0\nh = 0.5\nn = 2\n')
    code, text = run("adm", f, "--m", 1, "--quad", 4)
    assert code == EXIT_OK and text.splitlines()[0] == "x,u0term,u1term,sum0,sum1,nu0,nu1"
    assert run("adm", "example1", "--window", 0, 60)[0] == EXIT_INPUT


def test_compare_summary_and_csv(tmp_path):
    code, text = run("compare", "example1", "--m", 3)
    assert code == EXIT_OK
    ratios = dict(line.split("=", 1) for line in text.splitlines() if line.startswith(("fd_ratio", "adm_ratio")))
    assert float(ratios["fd_ratio"]) < 1 <= float(ratios["adm_ratio"])
    path = tmp_path / "cmp.csv"
    assert run("compare", "example1", "--m", 1, "--window", 0, 0, "--out", path)[0] == EXIT_OK
    header, data = read_columns(path)
    assert header == ["m", "fd_sup_error", "adm_sup_error"]
    np.testing.assert_array_equal(data[:, 1:], 0.0)


def test_compare_u_independent_against_reference(tmp_path):
    f = write(tmp_path, "p.prob", 'N = "-1-x"\nphi = "cos(x)"\nx0 = 0\nu0 = 0.5\nh = 0.25\nn = 4\nadm_linear = -1\n')
    code, text = run("compare", f, "--m", 12)
    assert code == EXIT_OK and "truth=reference" in text
    last = [line for line in text.splitlines() if line.startswith("m=12 ")][0]
    fd, adm = (float(part.split("=")[1]) for part in last.split()[1:])
    assert fd <= 1e-6 and adm <= 1e-6


def test_radius_closed_form_case(tmp_path):
    code, text = run("radius", "example1", "--sigma", 1, "--B", 0, 1, "--V0", 1,
                     "--x-samples", 201, "--u-samples", 201)
    assert code == EXIT_OK
    vals = dict(line.split("=", 1) for line in text.splitlines() if "=" in line)
    assert abs(float(vals["g_max"]) - 4 / 3) <= 1e-8
    assert abs(float(vals["R"]) - 0.125) <= 1e-8
    assert "user supplied" in vals["sigma"]


def test_radius_example1_prints_Q_caveat():
    code, text = run("radius", "example1", "--x-samples", 401, "--u-samples", 401)
    assert code in (EXIT_OK, EXIT_ANALYSIS)
    assert "mu1=" in text and "Q=0" in text and "not defined" in text


def test_radius_non_polynomial_needs_coefficients(tmp_path):
    f = write(tmp_path, "p.prob", 'N = "-2-u^2/(1+u^2)"\nphi = "1"\nx0 = 0\nu0 = 0\nh = 0.5\nn = 2\n')
    assert run("radius", f, "--x-samples", 51, "--u-samples", 51)[0] == EXIT_ANALYSIS
    bad = write(tmp_path, "bad.prob", 'N = "u"\nphi = "1"\nx0 = 0\nu0 = 0\nh = 0.5\nn = 2\n')
    assert run("radius", bad, "--x-samples", 51, "--u-samples", 51)[0] == EXIT_CONDITION


def test_plot_is_deterministic(tmp_path, ex1_csv):
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    assert run("plot", ex1_csv[0], "--svg", a)[0] == EXIT_OK
    assert run("plot", ex1_csv[0], "--svg", b)[0] == EXIT_OK
    text = a.read_text(encoding="utf-8")
    assert a.read_bytes() == b.read_bytes()
    assert 'viewBox="0 0 800 600"' in text and 'version="1.1"' in text
    for j in range(4):
        assert f">delta{j}<" in text
    assert ">nu0<" not in text


def test_plot_discrepancy_with_gaps(tmp_path):
    path, svg = tmp_path / "ex2.csv", tmp_path / "nu.svg"
    run("solve", "example2", "--m", 2, "--out", path)
    assert run("plot", path, "--svg", svg)[0] == EXIT_OK
    text = svg.read_text(encoding="utf-8")
    assert all(f">nu{j}<" in text for j in range(3))
    assert "nan" not in text.lower()


def test_plot_errors(tmp_path, ex1_csv):
    svg = tmp_path / "x.svg"
    assert run("plot", ex1_csv[0], "--svg", svg, "--columns")[0] == EXIT_INPUT
    assert run("plot", ex1_csv[0], "--svg", svg, "--columns", "nope")[0] == EXIT_INPUT
    assert run("plot", tmp_path / "missing.csv", "--svg", svg)[0] == EXIT_INPUT
    assert default_columns(["x", "sum0", "nu0"]) == ["nu0"]
    assert default_columns(["x", "a"]) == ["a"]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "fdmethod", "check", "example1",
                           "--x-samples", "101", "--u-samples", "101"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "passed=true" in proc.stdout
