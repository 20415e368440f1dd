"""Classical Adomian decomposition baseline.

The equation u' = N(x,u) u + phi is split as u' = L u + R(x,u) u + phi with a
constant L and R = N - L.  The zeroth term solves the linear part with the
data, and term i+1 solves u' = L u + A_i, where A_i is the i-th Adomian
polynomial of the product R(x,u) u in the terms found so far.  There is no
grid parameter: the grid only fixes where terms are sampled.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .adomian import adomian_polys
from .expr import Const, Expression, Mul, Sub, Var, evaluate, jet_eval
from .fdcore import Problem, fd_solve, make_sampling
from .mesh import Grid, PiecewiseTerm, Quadrature, Sampling, truncate_grid


@dataclass
class AdmSolution:
    terms: list
    partial_sums: list
    L: float
    sampling: Sampling

    @property
    def m(self):
        return len(self.terms) - 1

    @property
    def approximation(self):
        return self.partial_sums[-1]


def remainder_product(p: Problem, L: float) -> Expression:
    """The expression (N(x,u) - L) * u whose Adomian polynomials drive ADM."""
    return Expression(Mul(Sub(p.N.root, Const(float(L))), Var("u")))


def _linear_solve(samp: Sampling, L, forcing, start):
    """Solve u' = L u + forcing on every panel, chaining node values from
    ``start`` at x0."""
    a = samp.grid.nodes[:-1, None]
    E = np.exp(L * (samp.xs - a))
    Q = E * samp.cumint(forcing / E)
    n = samp.shape[0]
    y = np.empty(n + 1)
    y[0] = start
    for i in range(n):
        y[i + 1] = E[i, -1] * y[i] + Q[i, -1]
    vals = E * y[:-1, None] + Q
    vals[0, 0] = start
    return PiecewiseTerm(samp, vals)


def adm_solve(p: Problem, m: int, g: Grid, q: Quadrature = Quadrature()) -> AdmSolution:
    """ADM terms u_A^(0)..u_A^(m) with linear split ``p.adm_linear`` (0 if unset)."""
    if m < 0:
        raise ValueError("order m must be >= 0")
    L = 0.0 if p.adm_linear is None else float(p.adm_linear)
    samp = make_sampling(p, g, q)
    phi = np.broadcast_to(evaluate(p.phi, samp.x_eval), samp.shape)
    terms = [_linear_solve(samp, L, phi, p.u0)]
    if m > 0:
        G = remainder_product(p, L)
        # jets about u_A^(0) are reused by every A_i
        jet = jet_eval(G, samp.x_eval, terms[0].values, m - 1).coeffs
        for i in range(m):
            u = np.stack([t.values for t in terms[: i + 1]])
            A = adomian_polys(jet[: i + 1], u)[i]
            terms.append(_linear_solve(samp, L, A, 0.0))
    acc = np.cumsum(np.stack([t.values for t in terms]), axis=0)
    sums = [PiecewiseTerm(samp, a) for a in acc]
    return AdmSolution(terms, sums, L, samp)


@dataclass
class Comparison:
    window: tuple
    fd_errors: list
    adm_errors: list
    fd_ratio: float | None
    adm_ratio: float | None
    truth: str


def window_mask(samp: Sampling, window):
    a, b = window
    if b < a:
        raise ValueError(f"window [{a}, {b}] is empty")
    return (samp.xs >= a) & (samp.xs <= b)


def adm_compare(p: Problem, m: int, g: Grid, window=None, q: Quadrature = Quadrature(),
                ref_tol=1e-10) -> Comparison:
    """Sup errors of FD and ADM partial sums over ``window`` for orders 0..m."""
    from .analysis import geometric_ratio, truth_function

    window = (p.x0, p.x_end) if window is None else tuple(float(v) for v in window)
    if window[0] < p.x0 or window[1] > p.x_end:
        raise ValueError(f"window {window} leaves [{p.x0}, {p.x_end}]")
    # both methods march from x0, so nothing beyond the window is needed
    g = truncate_grid(g, window[1])
    p = replace(p, x_end=g.x_end)
    fd = fd_solve(p, g, m, q)
    adm = adm_solve(p, m, g, q)
    mask = window_mask(fd.sampling, window)
    truth, label = truth_function(p, ref_tol)
    xs = fd.sampling.xs[mask]
    ref = truth(xs)

    def errs(sums):
        return [float(np.max(np.abs(ref - s.values[mask]), initial=0.0)) for s in sums]

    fe, ae = errs(fd.partial_sums), errs(adm.partial_sums)
    return Comparison(window, fe, ae, geometric_ratio(fe), geometric_ratio(ae), label)
