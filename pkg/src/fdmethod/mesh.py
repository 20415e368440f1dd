"""Grids, per-panel sampling, Simpson quadrature and piecewise series terms.

Each grid subinterval ("panel") carries S+1 samples at uniform values of a
panel parameter tau in [0, 1].  Ordinarily x = a + h*tau.  A panel flagged as
*graded* uses x = a + h*tau**2 instead; the quadratic map absorbs
(x - a)**(-1/2) singularities at the left end, so integrands that blow up at
x0 become smooth in tau.  Only the first panel is ever graded.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels


class GridError(ValueError):
    pass


class OutOfDomainError(ValueError):
    pass


class Grid:
    """Strictly increasing nodes x_0 < ... < x_n; ``h`` is the largest step."""

    def __init__(self, nodes, h=None):
        nodes = np.array(nodes, dtype=float)
        if nodes.ndim != 1 or nodes.size < 2:
            raise GridError("a grid needs at least two nodes")
        steps = np.diff(nodes)
        if not np.all(steps > 0) or not np.all(np.isfinite(nodes)):
            raise GridError("grid nodes must be finite and strictly increasing")
        nodes.setflags(write=False)
        self.nodes = nodes
        self.h = float(steps.max()) if h is None else float(h)

    @property
    def n_panels(self):
        return self.nodes.size - 1

    @property
    def x0(self):
        return float(self.nodes[0])

    @property
    def x_end(self):
        return float(self.nodes[-1])

    def __repr__(self):
        return f"Grid(n_panels={self.n_panels}, x0={self.x0}, x_end={self.x_end}, h={self.h})"


def uniform_grid(x0, h, n):
    """Nodes x0 + i*h for i = 0..n.  ``grid.h`` is the nominal step ``h``."""
    if not (h > 0) or not np.isfinite(h):
        raise GridError(f"step must be positive, got {h!r}")
    if int(n) != n or n < 1:
        raise GridError(f"panel count must be a positive integer, got {n!r}")
    return Grid(x0 + h * np.arange(int(n) + 1), h=h)


def truncate_grid(grid: Grid, x_end):
    """The leading nodes of ``grid`` up to the first node at or beyond ``x_end``."""
    last = int(np.searchsorted(grid.nodes, x_end, side="left"))
    last = min(max(last, 1), grid.nodes.size - 1)
    return Grid(grid.nodes[: last + 1], h=grid.h)


@dataclass(frozen=True)
class Quadrature:
    """Samples per panel (even) and the graded-first-panel policy.

    ``graded`` may be True, False, or None (decide from the problem data: the
    first panel is graded when N or phi cannot be evaluated at x0).
    """

    S: int = 32
    graded: bool | None = None

    def __post_init__(self):
        if self.S < 4 or self.S % 2:
            raise ValueError(f"samples per panel must be even and >= 4, got {self.S}")


def simpson_weights(S, a, b):
    """Composite Simpson weights for S+1 uniform samples on [a, b]."""
    if S < 2 or S % 2:
        raise ValueError(f"Simpson needs an even number of intervals, got {S}")
    w = np.ones(S + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * ((b - a) / (3.0 * S))


def integrate(values, a, b):
    """Composite Simpson estimate of the integral of samples over [a, b]."""
    values = np.asarray(values, dtype=float)
    S = values.size - 1
    if S < 2 or S % 2:
        raise ValueError(f"Simpson needs an odd number of samples, got {values.size}")
    if not b > a:
        raise ValueError("integration bounds must satisfy b > a")
    g = np.ascontiguousarray(values.reshape(1, -1))
    return float(kernels.cumulative_simpson(g, (b - a) / S)[0, -1])


# Lagrange weights on the 4-point stencil {0, 1, 2, 3} -------------------------


def _lagrange4(t):
    t = np.asarray(t, dtype=float)
    w = np.empty((4,) + t.shape)
    w[0] = -(t - 1) * (t - 2) * (t - 3) / 6.0
    w[1] = t * (t - 2) * (t - 3) / 2.0
    w[2] = -t * (t - 1) * (t - 3) / 2.0
    w[3] = t * (t - 1) * (t - 2) / 6.0
    return w


def _lagrange4_deriv(t):
    t = np.asarray(t, dtype=float)
    w = np.empty((4,) + t.shape)
    w[0] = -(3 * t * t - 12 * t + 11) / 6.0
    w[1] = (3 * t * t - 10 * t + 6) / 2.0
    w[2] = -(3 * t * t - 8 * t + 3) / 2.0
    w[3] = (3 * t * t - 6 * t + 2) / 6.0
    return w


class Sampling:
    """Sample layout of a grid: abscissae, Jacobians and quadrature in tau."""

    OPEN_OFFSET = 1e-12

    def __init__(self, grid: Grid, S: int = 32, graded_first: bool = False):
        if S < 4 or S % 2:
            raise ValueError(f"samples per panel must be even and >= 4, got {S}")
        self.grid = grid
        self.S = S
        self.graded_first = bool(graded_first)
        tau = np.arange(S + 1) / S
        a = grid.nodes[:-1, None]
        width = np.diff(grid.nodes)[:, None]
        xs = a + width * tau
        jac = np.broadcast_to(width, xs.shape).copy()
        if self.graded_first:
            xs[0] = grid.nodes[0] + width[0] * tau * tau
            jac[0] = 2.0 * width[0] * tau
        # panel ends are the grid nodes themselves, bit for bit
        xs[:, 0] = grid.nodes[:-1]
        xs[:, -1] = grid.nodes[1:]
        x_eval = xs.copy()
        if self.graded_first:
            x_eval[0, 0] = grid.nodes[0] + width[0, 0] * self.OPEN_OFFSET
        for arr in (xs, jac, x_eval):
            arr.setflags(write=False)
        self.tau = tau
        self.xs = xs
        self.jac = jac
        self.x_eval = x_eval
        self.width = width[:, 0]

    @property
    def shape(self):
        return self.xs.shape

    def cumint(self, values, panel=None):
        """Running integral from each panel's left end, at every sample.

        ``values`` has the sample shape ``(panels, S+1)``, or ``(1, S+1)``
        when a single ``panel`` is given.  On a graded first panel the
        tau-integrand at tau=0 is never trusted: it is replaced by cubic
        extrapolation from the next four samples.
        """
        jac = self.jac if panel is None else self.jac[panel : panel + 1]
        g = np.array(values, dtype=float) * jac
        if self.graded_first and panel in (None, 0):
            g[0, 0] = 4.0 * g[0, 1] - 6.0 * g[0, 2] + 4.0 * g[0, 3] - g[0, 4]
        return kernels.cumulative_simpson(np.ascontiguousarray(g), 1.0 / self.S)

    def locate(self, x):
        """Panel index and fractional sample position for points ``x``."""
        x = np.asarray(x, dtype=float)
        nodes = self.grid.nodes
        bad = (x < nodes[0]) | (x > nodes[-1]) | ~np.isfinite(x)
        if np.any(bad):
            xb = float(np.broadcast_to(x, bad.shape)[bad][0]) if bad.ndim else float(x)
            raise OutOfDomainError(f"x={xb!r} lies outside [{nodes[0]!r}, {nodes[-1]!r}]")
        panel = np.clip(np.searchsorted(nodes, x, side="left") - 1, 0, self.grid.n_panels - 1)
        rel = (x - nodes[panel]) / self.width[panel]
        rel = np.clip(rel, 0.0, 1.0)
        if self.graded_first:
            rel = np.where(panel == 0, np.sqrt(rel), rel)
        return panel, rel * self.S

    def flat_x(self):
        return flatten_samples(self.xs)

    def dx_dtau(self, panel, tau):
        w = self.width[panel]
        if self.graded_first:
            return np.where(panel == 0, 2.0 * w * tau, w)
        return w


@dataclass(frozen=True, eq=False)
class PiecewiseTerm:
    """One series term sampled panel by panel.

    ``values[i, k]`` is the term at ``sampling.xs[i, k]``; ``endpoint_values``
    holds the value at each grid node (left limit at interior nodes).
    """

    sampling: Sampling
    values: np.ndarray
    endpoint_values: np.ndarray = field(default=None)

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.shape != self.sampling.shape:
            raise ValueError(f"sample array has shape {vals.shape}, expected {self.sampling.shape}")
        if self.endpoint_values is None:
            ends = np.concatenate([vals[:1, 0], vals[:, -1]])
        else:
            ends = np.array(self.endpoint_values, dtype=float)
        vals.setflags(write=False)
        ends.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "endpoint_values", ends)

    @property
    def grid(self):
        return self.sampling.grid

    def __add__(self, other):
        return PiecewiseTerm(self.sampling, self.values + other.values, self.endpoint_values + other.endpoint_values)

    def node_jumps(self):
        """|right limit - left limit| at interior nodes, scaled by 1 + |value|."""
        left = self.values[:-1, -1]
        right = self.values[1:, 0]
        return np.abs(right - left) / (1.0 + np.abs(left))

    def sup_norm(self):
        return float(np.max(np.abs(self.values)))

    def __call__(self, x):
        """Local cubic interpolation; grid nodes return the stored node value."""
        x = np.asarray(x, dtype=float)
        panel, s = self.sampling.locate(x)
        j0, t = _stencil(s, self.sampling.S)
        w = _lagrange4(t)
        rows = self.values[panel]
        idx = j0[..., None] + np.arange(4)
        vals = np.take_along_axis(np.atleast_2d(rows), np.atleast_2d(idx), axis=-1).reshape(idx.shape)
        out = np.einsum("k...,...k->...", w, vals)
        node_hit = np.isin(x, self.grid.nodes)
        if np.any(node_hit):
            pos = np.searchsorted(self.grid.nodes, x)
            pos = np.clip(pos, 0, self.grid.nodes.size - 1)
            out = np.where(node_hit, self.endpoint_values[pos], out)
        return float(out) if out.ndim == 0 else out

    def derivative(self, x):
        """d/dx of the local cubic interpolant (one-sided at nodes)."""
        x = np.asarray(x, dtype=float)
        panel, s = self.sampling.locate(x)
        j0, t = _stencil(s, self.sampling.S)
        w = _lagrange4_deriv(t)
        rows = self.values[panel]
        idx = j0[..., None] + np.arange(4)
        vals = np.take_along_axis(np.atleast_2d(rows), np.atleast_2d(idx), axis=-1).reshape(idx.shape)
        d_ds = np.einsum("k...,...k->...", w, vals)
        tau = s / self.sampling.S
        with np.errstate(divide="ignore", invalid="ignore"):
            out = d_ds * self.sampling.S / self.sampling.dx_dtau(panel, tau)
        return float(out) if np.ndim(out) == 0 else out

    def sample_derivatives(self):
        """Interpolant derivative at every sample, using each sample's own panel."""
        S = self.sampling.S
        k = np.arange(S + 1)
        j0 = np.clip(k - 1, 0, S - 3)
        w = _lagrange4_deriv(k - j0)  # (4, S+1)
        idx = j0[:, None] + np.arange(4)  # (S+1, 4)
        d_ds = np.einsum("kj,pjk->pj", w, self.values[:, idx])
        with np.errstate(divide="ignore", invalid="ignore"):
            jac = np.where(self.sampling.jac > 0, self.sampling.jac, np.nan)
            return d_ds * S / jac

    def flat(self):
        """(x, value) at distinct sample abscissae; an interior node takes the
        sample of the panel on its left."""
        return self.sampling.flat_x(), flatten_samples(self.values)


def flatten_samples(a):
    """Collapse ``(panels, S+1)`` samples to one row per distinct abscissa,
    keeping the left panel's value at interior nodes."""
    return np.concatenate([a[:1, 0], a[:, 1:].ravel()])


def _stencil(s, S):
    k = np.clip(np.floor(s).astype(int), 0, S - 1)
    j0 = np.clip(k - 1, 0, S - 3)
    return j0, s - j0


def eval_term(term: PiecewiseTerm, x):
    """Value of ``term`` at ``x`` by local cubic interpolation."""
    return term(x)
