"""Command-line front end: ``fdmethod {check,solve,adm,compare,radius,plot}``.

Exit codes: 0 success, 1 parse or I/O error, 2 a condition of the
convergence theorem failed, 3 analysis failure, 4 solver failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
import warnings
from dataclasses import replace

import numpy as np

from . import analysis
from .adm import adm_compare, adm_solve
from .expr import ExprDomainError, ParseError
from .fdcore import DivergenceWarning, ProblemError, fd_solve
from .mesh import GridError, OutOfDomainError, Quadrature, flatten_samples, truncate_grid
from .problemfile import ProblemFileError, load_problem
from .svg import line_plot

EXIT_OK, EXIT_INPUT, EXIT_CONDITION, EXIT_ANALYSIS, EXIT_SOLVER = 0, 1, 2, 3, 4


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


# output helpers ---------------------------------------------------------------


def fmt(v):
    return format(float(v), ".17g")


def write_csv(path, header, columns, stdout):
    rows = np.column_stack(columns)
    buf = io.StringIO(newline="")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    text = buf.getvalue()
    if path is None or path == "-":
        stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _quad(args, pf):
    S = args.quad if getattr(args, "quad", None) else pf.quadrature_samples
    try:
        return Quadrature(S)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_INPUT) from exc


def _truth(pf, args):
    """(column name, callable) or (None, None) when no truth is available."""
    p = pf.problem
    if p.exact is not None:
        return "exact", analysis.truth_function(p)[0]
    if getattr(args, "reference", False):
        try:
            return "reference", analysis.reference_solve(p, args.ref_tol)
        except analysis.AnalysisError as exc:
            raise CliError(str(exc), EXIT_SOLVER) from exc
    return None, None


def series_columns(p, sol, truth_name, truth, keep=None):
    """CSV header and columns for a solved series (FD or ADM)."""
    samp = sol.partial_sums[0].sampling
    x = samp.flat_x()
    keep = np.ones(x.shape, dtype=bool) if keep is None else keep
    m = len(sol.terms) - 1
    header = ["x"]
    cols = [x[keep]]
    header += [f"u{j}term" for j in range(m + 1)]
    cols += [flatten_samples(t.values)[keep] for t in sol.terms]
    sums = [flatten_samples(s.values)[keep] for s in sol.partial_sums]
    header += [f"sum{j}" for j in range(m + 1)]
    cols += sums
    if truth is not None:
        ref = np.asarray(truth(x[keep]), dtype=float)
        header.append(truth_name)
        cols.append(ref)
        header += [f"delta{j}" for j in range(m + 1)]
        cols += [ref - s for s in sums]
    header += [f"nu{j}" for j in range(m + 1)]
    cols += [analysis.discrepancy_samples(p, s)[1][keep] for s in sol.partial_sums]
    return header, cols


def _sup(a):
    a = np.abs(np.asarray(a))
    a = a[np.isfinite(a)]
    return float(a.max()) if a.size else 0.0


# commands --------------------------------------------------------------------


def cmd_check(args, out):
    pf = load_problem(args.file)
    r = analysis.check_conditions(pf.problem, args.U, args.x_samples, args.u_samples)
    (xlo, xhi), (ulo, uhi) = r.box
    out.write(f"problem {pf.problem.name}: sampled box x in [{xlo:.6g}, {xhi:.6g}], u in [{ulo:g}, {uhi:g}]\n")
    for name, ok in r.passed.items():
        out.write(f"  {name}: {'pass' if ok else 'FAIL'}\n")
    for note in r.notes:
        out.write(f"  note: {note}\n")
    out.write(f"alpha={fmt(r.alpha)}\n")
    out.write(f"k={fmt(r.k)}\n")
    out.write(f"mu={fmt(r.mu)}\n")
    out.write(f"polynomial_degree={r.polynomial_degree if r.polynomial_degree is not None else 'none'}\n")
    out.write(f"passed={'true' if r.ok else 'false'}\n")
    return EXIT_OK if r.ok else EXIT_CONDITION


def _solve_common(args, pf):
    if args.m is not None and args.m < 0:
        raise CliError("--m must be >= 0", EXIT_INPUT)
    return pf.m if args.m is None else args.m


def cmd_solve(args, out):
    pf = load_problem(args.file)
    m = _solve_common(args, pf)
    q = _quad(args, pf)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", DivergenceWarning)
        sol = fd_solve(pf.problem, pf.grid, m, q)
    for w in caught:
        sys.stderr.write(f"warning: {w.message}\n")
    name, truth = _truth(pf, args)
    header, cols = series_columns(pf.problem, sol, name, truth)
    write_csv(args.out, header, cols, out)
    if args.out not in (None, "-"):
        _summary(out, header, cols)
    return EXIT_OK


def _summary(out, header, cols):
    for h, c in zip(header, cols):
        if h.startswith(("delta", "nu")):
            out.write(f"sup|{h}|={fmt(_sup(c))}\n")


def _window(args, pf):
    p = pf.problem
    w = args.window if args.window is not None else pf.window
    w = (p.x0, p.x_end) if w is None else (float(w[0]), float(w[1]))
    if w[1] < w[0] or w[0] < p.x0 or w[1] > p.x_end:
        raise CliError(f"window [{w[0]}, {w[1]}] must lie inside [{p.x0}, {p.x_end}]", EXIT_INPUT)
    return w


def cmd_adm(args, out):
    pf = load_problem(args.file)
    m = _solve_common(args, pf)
    q = _quad(args, pf)
    a, b = _window(args, pf)
    grid = truncate_grid(pf.grid, b)
    p = replace(pf.problem, x_end=grid.x_end)
    sol = adm_solve(p, m, grid, q)
    name, truth = _truth(replace(pf, problem=p), args)
    x = sol.sampling.flat_x()
    header, cols = series_columns(p, sol, name, truth, keep=(x >= a) & (x <= b))
    write_csv(args.out, header, cols, out)
    if args.out not in (None, "-"):
        _summary(out, header, cols)
    return EXIT_OK


def cmd_compare(args, out):
    pf = load_problem(args.file)
    m = _solve_common(args, pf)
    q = _quad(args, pf)
    w = _window(args, pf)
    try:
        c = adm_compare(pf.problem, m, pf.grid, w, q, args.ref_tol)
    except analysis.AnalysisError as exc:
        raise CliError(str(exc), EXIT_SOLVER) from exc
    cols = [np.arange(m + 1), np.array(c.fd_errors), np.array(c.adm_errors)]
    if args.out is not None:
        write_csv(args.out, ["m", "fd_sup_error", "adm_sup_error"], cols, out)
    out.write(f"window=[{fmt(w[0])}, {fmt(w[1])}] truth={c.truth}\n")
    for j in range(m + 1):
        out.write(f"m={j} fd={fmt(c.fd_errors[j])} adm={fmt(c.adm_errors[j])}\n")
    out.write(f"fd_ratio={'none' if c.fd_ratio is None else fmt(c.fd_ratio)}\n")
    out.write(f"adm_ratio={'none' if c.adm_ratio is None else fmt(c.adm_ratio)}\n")
    return EXIT_OK


def cmd_radius(args, out):
    pf = load_problem(args.file)
    p = pf.problem
    Q = pf.Q if args.Q is None else args.Q
    report = analysis.check_conditions(p, args.U, args.x_samples, args.u_samples)
    out.write(f"alpha={fmt(report.alpha)}\n")
    out.write(f"k={fmt(report.k)}\n")
    out.write(f"mu={fmt(report.mu)}\n")
    consts = None
    if report.passed["condition3"]:
        consts = analysis.certify_constants(p, report, pf.grid.h, Q)
        out.write(f"mu1={fmt(consts.mu1)}\n")
    else:
        out.write("mu1=unavailable (condition 3 failed)\n")
    if args.sigma is not None:
        sigma = args.sigma
    elif consts is not None:
        sigma = consts.sigma
    else:
        raise CliError("sigma cannot be certified because condition 3 failed; pass --sigma", EXIT_CONDITION)
    note = " (user supplied)" if args.sigma is not None else f" (Q={fmt(Q)}: {consts.Q_note})"
    out.write(f"sigma={fmt(sigma)}{note}\n")
    B = args.B if args.B is not None else pf.majorant_B
    V0 = args.V0
    if V0 is None:
        if not np.isfinite(report.mu):
            raise CliError("mu is not certified; pass --V0", EXIT_CONDITION)
        V0 = report.mu
    try:
        spec = analysis.majorant_from_problem(p, replace(report, mu=V0), sigma, B=B)
    except analysis.MajorantError as exc:
        raise CliError(str(exc), EXIT_ANALYSIS) from exc
    out.write(f"majorant_B={' '.join(fmt(b) for b in spec.B)}\n")
    out.write(f"V0={fmt(spec.V0)}\n")
    out.write(f"Sigma={fmt(spec.Sigma)}\n")
    mu1 = consts.mu1 if consts is not None else None
    try:
        r = analysis.radius(spec, mu1)
    except analysis.RadiusError as exc:
        out.write(f"radius: {exc}\n")
        return EXIT_ANALYSIS
    out.write(f"g_max={fmt(r.g_max)}\n")
    out.write(f"R={fmt(r.R)}\n")
    out.write(f"slope_at_V0={fmt(r.slope_at_V0)} expected={fmt(r.slope_expected)}\n")
    adm_h = "unavailable" if r.admissible_h is None else fmt(r.admissible_h)
    out.write(f"admissible_h={adm_h}\n")
    return EXIT_OK


def read_csv(path):
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise CliError(f"{path}: {exc.strerror or exc}", EXIT_INPUT) from exc
    if len(rows) < 2:
        raise CliError(f"{path}: no data rows", EXIT_INPUT)
    header = rows[0]
    try:
        data = np.array([[float(v) for v in r] for r in rows[1:]])
    except ValueError as exc:
        raise CliError(f"{path}: {exc}", EXIT_INPUT) from exc
    return header, data


def default_columns(header):
    for prefix in ("delta", "nu", "sum"):
        cols = [h for h in header if h.startswith(prefix)]
        if cols:
            return cols
    return [h for h in header[1:]]


def cmd_plot(args, out):
    header, data = read_csv(args.csv)
    cols = default_columns(header) if args.columns is None else args.columns
    if not cols:
        raise CliError("no columns selected", EXIT_INPUT)
    missing = [c for c in cols if c not in header]
    if missing:
        raise CliError(f"unknown column(s): {', '.join(missing)}; available: {', '.join(header)}", EXIT_INPUT)
    x = data[:, 0]
    series = [(c, data[:, header.index(c)]) for c in cols]
    text = line_plot(x, series, title=args.title or ", ".join(cols), xlabel=header[0])
    try:
        with open(args.svg, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise CliError(f"{args.svg}: {exc.strerror or exc}", EXIT_INPUT) from exc
    return EXIT_OK


# argument parsing ---------------------------------------------------------------


def build_parser():
    ap = argparse.ArgumentParser(prog="fdmethod", description="FD-method series solver for u' - N(x,u) u = phi(x).")
    sub = ap.add_subparsers(dest="command", required=True)

    def problem_arg(sp):
        sp.add_argument("file", help="problem file, or a bundled name such as example1")

    def box_args(sp):
        sp.add_argument("--U", type=float, default=10.0, help="u half-width of the condition box (default 10)")
        sp.add_argument("--x-samples", type=int, default=2001)
        sp.add_argument("--u-samples", type=int, default=2001)

    def run_args(sp):
        sp.add_argument("--m", type=int, default=None, help="series order (default from file)")
        sp.add_argument("--out", default=None, help="CSV path ('-' or omitted: stdout)")
        sp.add_argument("--quad", type=int, default=None, help="samples per subinterval (even)")
        sp.add_argument("--ref-tol", type=float, default=1e-10, help="reference integrator tolerance")
        sp.add_argument("--reference", action="store_true",
                        help="compare against an RK reference when the file has no exact solution")

    sp = sub.add_parser("check", help="check the convergence conditions")
    problem_arg(sp)
    box_args(sp)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("solve", help="FD-method terms, partial sums, errors and discrepancies as CSV")
    problem_arg(sp)
    run_args(sp)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("adm", help="Adomian decomposition baseline as CSV")
    problem_arg(sp)
    run_args(sp)
    sp.add_argument("--window", type=float, nargs=2, metavar=("A", "B"), default=None)
    sp.set_defaults(func=cmd_adm)

    sp = sub.add_parser("compare", help="sup errors of FD and ADM per order")
    problem_arg(sp)
    run_args(sp)
    sp.add_argument("--window", type=float, nargs=2, metavar=("A", "B"), default=None)
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("radius", help="majorant radius and admissible step")
    problem_arg(sp)
    box_args(sp)
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--sigma", type=float, default=None, help="use this sigma instead of the certified one")
    g.add_argument("--auto", action="store_true", help="certify sigma from the problem (default)")
    sp.add_argument("--Q", type=float, default=None, help="value of the undetermined constant Q in sigma (default 0)")
    sp.add_argument("--B", type=float, nargs="+", default=None, help="majorant coefficients B_0 B_1 ...")
    sp.add_argument("--V0", type=float, default=None, help="majorant start value (default mu)")
    sp.set_defaults(func=cmd_radius)

    sp = sub.add_parser("plot", help="render CSV columns as an SVG line plot")
    sp.add_argument("csv")
    sp.add_argument("--svg", required=True, help="output SVG path")
    sp.add_argument("--columns", nargs="*", default=None, help="columns to draw (default: delta*, else nu*, else sum*)")
    sp.add_argument("--title", default=None)
    sp.set_defaults(func=cmd_plot)
    return ap


def main(argv=None, stdout=None):
    stdout = sys.stdout if stdout is None else stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, stdout)
    except CliError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return exc.code
    except BrokenPipeError:
        # reader went away (piped into head); nothing left to report
        sys.stdout = None
        return EXIT_OK
    except (ParseError, ProblemFileError, GridError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    except analysis.AnalysisError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_ANALYSIS
    except (ExprDomainError, ProblemError, OutOfDomainError, FloatingPointError) as exc:
        sys.stderr.write(f"solver error: {exc}\n")
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
