"""The FD-method for u' - N(x, u) u = phi(x), u(x0) = u0.

The base term freezes the u-argument of N at the left node of every panel,
which turns each panel into a linear problem solved with an integrating
factor.  Correction u^(j+1) solves the same frozen-coefficient linear problem
driven by F^(j+1), a combination of Adomian polynomials of N taken at the live
point x and at the frozen node.  The approximation of order m is the partial
sum u^(0) + ... + u^(m).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .adomian import adomian_polys
from .expr import Expression, ExprDomainError, evaluate, jet_eval, parse
from .mesh import Grid, PiecewiseTerm, Quadrature, Sampling


class ProblemError(ValueError):
    pass


class DivergenceWarning(RuntimeWarning):
    pass


def _as_expr(e):
    if e is None or isinstance(e, Expression):
        return e
    return parse(e)


@dataclass(frozen=True)
class Problem:
    """Cauchy problem u' - N(x,u) u = phi(x), u(x0) = u0 on [x0, x_end].

    Expression fields accept source strings.  ``adm_linear`` is the linear
    coefficient L of the Adomian split; ``weight`` multiplies the discrepancy.
    """

    N: Expression
    phi: Expression
    x0: float
    u0: float
    x_end: float
    exact: Expression | None = None
    adm_linear: float | None = None
    weight: Expression | None = None
    name: str = ""

    def __post_init__(self):
        for attr in ("N", "phi", "exact", "weight"):
            object.__setattr__(self, attr, _as_expr(getattr(self, attr)))
        for attr in ("x0", "u0", "x_end"):
            object.__setattr__(self, attr, float(getattr(self, attr)))
        if not self.x_end > self.x0:
            raise ProblemError(f"x_end ({self.x_end}) must exceed x0 ({self.x0})")
        for attr in ("phi", "exact", "weight"):
            e = getattr(self, attr)
            if e is not None and e.depends_on("u"):
                raise ProblemError(f"{attr} must be a function of x only")
        if self.exact is not None:
            try:
                v = evaluate(self.exact, self.x0)
            except ExprDomainError:
                v = None
            if v is not None and abs(v - self.u0) > 1e-10:
                raise ProblemError(f"exact solution gives {v!r} at x0, expected u0={self.u0!r}")


@dataclass
class FdSolution:
    terms: list
    partial_sums: list
    grid: Grid
    m: int
    sampling: Sampling
    term_norms: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def approximation(self):
        return self.partial_sums[-1]


def needs_grading(p: Problem):
    """True when N or phi cannot be evaluated at x0 (singular start)."""
    try:
        vals = (evaluate(p.N, p.x0, p.u0), evaluate(p.phi, p.x0))
    except ExprDomainError:
        return True
    return not all(np.isfinite(vals))


def make_sampling(p: Problem, g: Grid, q: Quadrature) -> Sampling:
    if abs(g.x0 - p.x0) > 1e-12 * max(1.0, abs(p.x0)):
        raise ProblemError(f"grid starts at {g.x0}, problem at {p.x0}")
    if abs(g.x_end - p.x_end) > 1e-9 * max(1.0, abs(p.x_end)):
        raise ProblemError(f"grid ends at {g.x_end}, problem at {p.x_end}")
    graded = needs_grading(p) if q.graded is None else q.graded
    return Sampling(g, q.S, graded_first=graded)


def _phi_samples(p, samp):
    return np.broadcast_to(evaluate(p.phi, samp.x_eval), samp.shape)


def _base(p: Problem, samp: Sampling):
    phi = _phi_samples(p, samp)
    P, S1 = samp.shape
    vals = np.empty((P, S1))
    c = p.u0
    for i in range(P):
        x = samp.x_eval[i : i + 1]
        n = np.broadcast_to(evaluate(p.N, x, c), x.shape)
        E = np.exp(samp.cumint(n, i))
        row = E * (c + samp.cumint(phi[i : i + 1] / E, i))
        row[0, 0] = c
        vals[i] = row[0]
        c = row[0, -1]
    return PiecewiseTerm(samp, vals)


def solve_base(p: Problem, g: Grid, q: Quadrature = Quadrature()) -> PiecewiseTerm:
    """u^(0): frozen-argument linear solve, panel by panel from x0."""
    return _base(p, make_sampling(p, g, q))


class _Frozen:
    """Per-run data that depends only on u^(0): jets of N about the frozen
    node values, the integrating factor and the homogeneous multiplier."""

    def __init__(self, p, samp, base, order):
        self.samp = samp
        self.c = base.endpoint_values[:-1]
        self.jet_node = jet_eval(p.N, samp.x_eval, self.c[:, None], order).coeffs
        self.jet_live = jet_eval(p.N, samp.x_eval, base.values, order).coeffs
        n = self.jet_node[0]
        dn = self.jet_node[1] if order >= 1 else np.zeros_like(n)
        self.E = np.exp(samp.cumint(n))
        self.P = self.E * (1.0 + samp.cumint(dn * base.values / self.E))


def assemble_F(j, terms, p: Problem, i=None, q: Quadrature = Quadrature(), _frozen=None):
    """F^(j+1) at the samples of panel ``i`` (all panels when ``i`` is None)."""
    if len(terms) < j + 1:
        raise ValueError(f"F^({j + 1}) needs terms u^(0)..u^({j})")
    fr = _frozen or _Frozen(p, terms[0].sampling, terms[0], j + 1)
    rows = slice(None) if i is None else slice(i, i + 1)
    jn = fr.jet_node[: j + 2, rows]
    jl = fr.jet_live[: j + 1, rows]
    live = np.stack([t.values[rows] for t in terms[: j + 1]])
    node = np.stack([t.endpoint_values[:-1][rows] for t in terms[: j + 1]] + [np.zeros(live.shape[1])])
    node = np.broadcast_to(node[:, :, None], (j + 2,) + live.shape[1:])
    a_node = adomian_polys(jn, node)
    a_live = adomian_polys(jl, live)
    F = a_node[j + 1] * live[0]
    for q_ in range(1, j + 1):
        F = F + a_node[j + 1 - q_] * live[q_]
    for q_ in range(0, j + 1):
        F = F + (a_live[j - q_] - a_node[j - q_]) * live[q_]
    return F if i is None else F[0]


def _correction(j, fr, terms):
    samp = fr.samp
    F = assemble_F(j, terms, None, _frozen=fr)
    Q = fr.E * samp.cumint(F / fr.E)
    P = fr.P
    y = np.empty(samp.shape[0] + 1)
    y[0] = 0.0
    for i in range(samp.shape[0]):
        y[i + 1] = P[i, -1] * y[i] + Q[i, -1]
    vals = P * y[:-1, None] + Q
    return PiecewiseTerm(samp, vals)


def solve_correction(j, p: Problem, g: Grid, terms, q: Quadrature = Quadrature()) -> PiecewiseTerm:
    """u^(j+1) from u^(0)..u^(j); zero at x0, continuous at every node."""
    samp = terms[0].sampling
    fr = _Frozen(p, samp, terms[0], j + 1)
    return _correction(j, fr, terms)


def fd_solve(p: Problem, g: Grid, m: int, q: Quadrature = Quadrature()) -> FdSolution:
    """Terms u^(0)..u^(m) and the partial sums of the FD series."""
    if m < 0:
        raise ValueError("order m must be >= 0")
    samp = make_sampling(p, g, q)
    base = _base(p, samp)
    terms = [base]
    fr = _Frozen(p, samp, base, max(m, 1)) if m > 0 else None
    for j in range(m):
        terms.append(_correction(j, fr, terms))
    norms = [t.sup_norm() for t in terms]
    notes = []
    for j in range(2, len(norms)):
        if norms[j - 2] > 0 and norms[j] > 10.0 * norms[j - 2]:
            msg = f"term norms grow from {norms[j - 2]:.3e} (j={j - 2}) to {norms[j]:.3e} (j={j})"
            notes.append(msg)
            warnings.warn(msg, DivergenceWarning, stacklevel=2)
    acc = np.cumsum(np.stack([t.values for t in terms]), axis=0)
    sums = [PiecewiseTerm(samp, a) for a in acc]
    return FdSolution(terms, sums, g, m, samp, norms, notes)
