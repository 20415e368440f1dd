import numpy as np
import pytest

from fdmethod.problemfile import ProblemFileError, bundled_problems, load_problem, parse_problem_text

MINIMAL = '''
N = "-1"        # constant decay
phi = "0"
x0 = 0
u0 = 1
h = 1/4
n = 4
'''


def test_minimal_file():
    pf = parse_problem_text(MINIMAL)
    assert pf.problem.x_end == 1.0
    np.testing.assert_allclose(pf.grid.nodes, [0, 0.25, 0.5, 0.75, 1.0])
    assert (pf.quadrature_samples, pf.m, pf.window, pf.majorant_B, pf.Q) == (32, 3, None, None, 0.0)
    assert pf.quadrature.S == 32


def test_bundled_examples():
    assert {"example1", "example2"} <= set(bundled_problems())
    e1 = load_problem("example1")
    assert e1.problem.name == "example1"
    assert e1.grid.n_panels == 144 and e1.grid.h == pytest.approx(1 / 3)
    assert e1.problem.x_end == 48 and e1.window == (0.0, 6.0)
    assert e1.problem.adm_linear == -1
    e2 = load_problem("example2")
    assert e2.problem.weight is not None and e2.grid.n_panels == 20


def test_load_from_disk(tmp_path):
    f = tmp_path / "p.prob"
    f.write_text(MINIMAL + 'nodes = 0, 0.5 1\nname = "disk"\n'.replace("nodes", "x_end = 1\nnodes"), encoding="utf-8")
    pf = load_problem(f)
    np.testing.assert_allclose(pf.grid.nodes, [0, 0.5, 1])
    assert pf.problem.name == "disk"


def test_hash_inside_quotes_is_kept():
    pf = parse_problem_text(MINIMAL + 'name = "a#b"\n')
    assert pf.problem.name == "a#b"


@pytest.mark.parametrize("text, line, fragment", [
    (MINIMAL + "bogus = 1\n", 8, "unknown key"),
    (MINIMAL + "x0 = 2\n", 8, "duplicate"),
    (MINIMAL + "exact = sin(x)\n", 8, "double-quoted"),
    (MINIMAL + 'exact = "sin(x"\n', 8, "exact"),
    (MINIMAL + "m = 1.5\n", 8, "integer"),
    (MINIMAL + "Q = x\n", 8, "constant"),
    (MINIMAL + "just words\n", 8, "key = value"),
])
def test_errors_carry_line_numbers(text, line, fragment):
    with pytest.raises(ProblemFileError) as e:
        parse_problem_text(text, "f.prob")
    assert e.value.line == line
    assert fragment in str(e.value) and f"f.prob:{line}" in str(e.value)


@pytest.mark.parametrize("text, fragment", [
    ('N = "-1"\nphi = "0"\nx0 = 0\n', "u0"),
    ('N = "-1"\nphi = "0"\nx0 = 0\nu0 = 1\n', "grid"),
    (MINIMAL + "window = 0 0.5 1\n", "window"),
    (MINIMAL + 'exact = "sin(x)"\n', "exact"),
])
def test_structural_errors(text, fragment):
    with pytest.raises(ProblemFileError, match=fragment):
        parse_problem_text(text)


def test_missing_file(tmp_path):
    with pytest.raises(ProblemFileError):
        load_problem(tmp_path / "none.prob")
