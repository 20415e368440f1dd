"""Flat ``key = value`` problem files.

Expressions are double-quoted; numbers may be written as constant
expressions (``h = 1/3``); ``#`` starts a comment.  Example::

    name = "example1"
    N = "-(1+u^2)"
    phi = "cos(x)+sin(x)+sin(x)^3"
    x0 = 0
    u0 = 0
    x_end = 48
    h = 1/3
    n = 144
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .expr import ParseError, evaluate, parse
from .fdcore import Problem
from .mesh import Grid, Quadrature, uniform_grid

EXPRESSION_KEYS = ("N", "phi", "exact", "weight")
TEXT_KEYS = ("name",)
NUMBER_KEYS = ("x0", "u0", "x_end", "adm_linear", "h", "Q", "V0", "sigma")
INTEGER_KEYS = ("n", "quadrature_samples", "m")
LIST_KEYS = ("nodes", "window", "majorant_B")
KNOWN_KEYS = EXPRESSION_KEYS + TEXT_KEYS + NUMBER_KEYS + INTEGER_KEYS + LIST_KEYS


class ProblemFileError(ValueError):
    def __init__(self, message, path="<string>", line=None):
        self.path = path
        self.line = line
        where = path if line is None else f"{path}:{line}"
        super().__init__(f"{where}: {message}")


@dataclass
class ProblemFile:
    problem: Problem
    grid: Grid
    quadrature_samples: int = 32
    m: int = 3
    window: tuple | None = None
    majorant_B: np.ndarray | None = None
    Q: float = 0.0
    raw: dict = field(default_factory=dict)

    @property
    def quadrature(self):
        return Quadrature(self.quadrature_samples)


def _strip_comment(line):
    out, quoted = [], False
    for ch in line:
        if ch == '"':
            quoted = not quoted
        elif ch == "#" and not quoted:
            break
        out.append(ch)
    return "".join(out).strip()


def _number(text, key, path, lineno):
    try:
        e = parse(text)
    except ParseError as exc:
        raise ProblemFileError(f"{key}: {exc}", path, lineno) from exc
    if e.variables:
        raise ProblemFileError(f"{key} must be a constant, got '{text}'", path, lineno)
    return float(evaluate(e, 0.0))


def parse_problem_text(text, path="<string>") -> ProblemFile:
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = _strip_comment(line)
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ProblemFileError(f"expected 'key = value', got '{line}'", path, lineno)
        if key not in KNOWN_KEYS:
            raise ProblemFileError(f"unknown key '{key}'", path, lineno)
        if key in raw:
            raise ProblemFileError(f"duplicate key '{key}'", path, lineno)
        quoted = len(value) >= 2 and value[0] == value[-1] == '"'
        if key in EXPRESSION_KEYS + TEXT_KEYS:
            if not quoted:
                raise ProblemFileError(f"{key} must be a double-quoted string", path, lineno)
            value = value[1:-1]
            if key in EXPRESSION_KEYS:
                try:
                    parse(value)
                except ParseError as exc:
                    raise ProblemFileError(f"{key}: {exc}", path, lineno) from exc
        elif key in LIST_KEYS:
            value = [_number(v.strip(), key, path, lineno) for v in value.replace(",", " ").split()]
        else:
            if quoted:
                value = value[1:-1]
            value = _number(value, key, path, lineno)
            if key in INTEGER_KEYS:
                if value != int(value):
                    raise ProblemFileError(f"{key} must be an integer", path, lineno)
                value = int(value)
        raw[key] = value
    return _build(raw, path)


def _build(raw, path):
    for key in ("N", "phi", "x0", "u0"):
        if key not in raw:
            raise ProblemFileError(f"missing required key '{key}'", path)
    if "nodes" in raw:
        grid = Grid(raw["nodes"])
    elif "h" in raw and "n" in raw:
        grid = uniform_grid(raw["x0"], raw["h"], raw["n"])
    else:
        raise ProblemFileError("grid needs either 'nodes' or both 'h' and 'n'", path)
    x_end = raw.get("x_end", grid.x_end)
    try:
        problem = Problem(
            N=raw["N"], phi=raw["phi"], x0=raw["x0"], u0=raw["u0"], x_end=x_end,
            exact=raw.get("exact"), adm_linear=raw.get("adm_linear"),
            weight=raw.get("weight"), name=raw.get("name", os.path.basename(path)),
        )
    except ValueError as exc:
        raise ProblemFileError(str(exc), path) from exc
    window = tuple(raw["window"]) if "window" in raw else None
    if window is not None and len(window) != 2:
        raise ProblemFileError("window needs two numbers", path)
    B = np.array(raw["majorant_B"]) if "majorant_B" in raw else None
    return ProblemFile(problem, grid, raw.get("quadrature_samples", 32), raw.get("m", 3),
                       window, B, raw.get("Q", 0.0), raw)


def bundled_problems():
    """Names of the problem files shipped with the package."""
    files = resources.files("fdmethod") / "data"
    return sorted(f.name[:-5] for f in files.iterdir() if f.name.endswith(".prob"))


def load_problem(path_or_name) -> ProblemFile:
    """Read a problem file from disk, or a bundled one by name ("example1")."""
    path = os.fspath(path_or_name)
    if not os.path.exists(path) and os.sep not in path and path in bundled_problems():
        res = resources.files("fdmethod") / "data" / f"{path}.prob"
        return parse_problem_text(res.read_text(encoding="utf-8"), f"{path}.prob")
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ProblemFileError(exc.strerror or str(exc), path) from exc
    return parse_problem_text(text, path)
