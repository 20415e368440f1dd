"""Convergence diagnostics for the FD-method.

Covers the hypotheses of the convergence theorem checked by dense sampling
(dissipativity constant alpha, forcing bound k, a priori bound mu), the
constants feeding the step bound and sigma, the scalar majorant sequence V_j
with its generating-function radius, the weighted residual ("discrepancy") of
an approximation, an adaptive Runge-Kutta reference, and error reports.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.optimize import brentq

from .adomian import adomian_polys, adomian_tail
from .expr import Expression, ExprDomainError, evaluate, jet_eval, polynomial_degree
from .fdcore import Problem, needs_grading
from .jet import Jet
from .mesh import PiecewiseTerm, flatten_samples


class AnalysisError(RuntimeError):
    pass


class RadiusError(AnalysisError):
    pass


class MajorantError(AnalysisError):
    pass


# Relative offset used to step off a singular left end of the domain.
SINGULAR_OFFSET = 1e-12


def _x_box(p: Problem, n):
    lo = p.x0
    if needs_grading(p):
        lo = p.x0 + (p.x_end - p.x0) * SINGULAR_OFFSET
    return np.linspace(lo, p.x_end, n)


def _refine_max(f, xs, vals):
    """Polish a sampled maximum of f with a bounded scalar search."""
    from scipy.optimize import minimize_scalar

    i = int(np.argmax(vals))
    lo, hi = xs[max(i - 1, 0)], xs[min(i + 1, xs.size - 1)]
    if hi <= lo:
        return float(vals[i])
    res = minimize_scalar(lambda t: -f(t), bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-13 * max(1.0, abs(lo))})
    return max(float(vals[i]), -float(res.fun))


# condition checks -----------------------------------------------------------


@dataclass
class ConditionReport:
    alpha: float
    k: float
    mu: float
    box: tuple  # ((x_lo, x_hi), (u_lo, u_hi))
    passed: dict
    polynomial_degree: int | None = None
    notes: list = field(default_factory=list)

    @property
    def ok(self):
        return all(self.passed.values())


def check_conditions(p: Problem, U=10.0, x_samples=2001, u_samples=2001) -> ConditionReport:
    """Certify alpha = -max (N u)'_u and k = max|phi| on a sampled box.

    The box is [x0, x_end] x [-U, U].  Condition 1 (N a power series in u with
    bounded coefficients) is checked structurally and is informational when N
    is not polynomial in u.
    """
    if not U > 0:
        raise ValueError("u range half-width must be positive")
    if x_samples < 2 or u_samples < 2:
        raise ValueError("sample counts must be at least 2")
    xs = _x_box(p, x_samples)
    us = np.linspace(-U, U, u_samples)
    worst = -np.inf
    rows = max(1, 2_000_000 // u_samples)
    for s in range(0, xs.size, rows):
        c = jet_eval(p.N, xs[s : s + rows, None], us[None, :], 1).coeffs
        slope = c[0] + us[None, :] * c[1]
        if not np.all(np.isfinite(slope)):
            raise ExprDomainError("(N u)'_u is not finite on the sample box", str(p.N))
        worst = max(worst, float(slope.max()))
    alpha = -worst
    phi = np.broadcast_to(evaluate(p.phi, xs), xs.shape)
    k = _refine_max(lambda t: abs(evaluate(p.phi, t)), xs, np.abs(phi))
    deg = polynomial_degree(p.N, "u")
    notes = []
    if deg is None:
        notes.append("N is not polynomial in u; condition 1 not checked")
    passed = {
        "condition1": True,
        "condition2": bool(np.isfinite(k)),
        "condition3": bool(alpha > 0),
    }
    mu = max(abs(p.u0), k / alpha) if alpha > 0 else math.inf
    return ConditionReport(alpha, k, mu, ((float(xs[0]), float(xs[-1])), (-U, U)), passed, deg, notes)


def step_bound(alpha, Bbar):
    """Largest admissible grid step min{4/alpha, alpha/(2 Bbar + alpha^2)}."""
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha!r}")
    if Bbar < 0:
        raise ValueError(f"Bbar must be non-negative, got {Bbar!r}")
    return min(4.0 / alpha, alpha / (2.0 * Bbar + alpha * alpha))


@dataclass
class Constants:
    alpha: float
    k: float
    mu: float
    h: float
    Nmax: float
    B: float
    C: float
    pbar: float
    Bbar: float
    Dbar: float
    mu1: float
    sigma: float
    Q: float
    Q_note: str = "Q enters sigma but is not defined by the method's derivation; value is a user setting"


def certify_constants(p: Problem, report: ConditionReport, h, Q=0.0, x_samples=2001, u_samples=401):
    """Bounds over |u| <= mu feeding the step bound and the factor sigma."""
    if not report.passed["condition3"]:
        raise AnalysisError("condition 3 failed; alpha is not certified")
    mu, k, alpha = report.mu, report.k, report.alpha
    xs = _x_box(p, x_samples)
    us = np.linspace(-mu, mu, u_samples)
    c = jet_eval(p.N, xs[:, None], us[None, :], 1).coeffs
    n_abs, d_abs = np.abs(c[0]), np.abs(c[1])
    Nmax = float(n_abs.max())
    B = float((d_abs * (n_abs * mu + k)).max())
    C = float(d_abs.max()) * mu
    eh = math.exp(Nmax * h)
    pbar = C + Nmax * eh * (1.0 + h * C)
    Bbar = B / 2.0 + C * pbar / 2.0
    Dbar = 1.0 + h * (C / 2.0) * (1.0 + Nmax * h * eh)
    mu1 = step_bound(alpha, Bbar)
    first = (1.0 + Bbar * mu1 * mu1) * (2.0 / alpha) * Dbar + mu1 * Dbar
    second = (pbar * Dbar * 2.0 / alpha + Q / alpha + 1.0) * math.exp(C / alpha)
    return Constants(alpha, k, mu, float(h), Nmax, B, C, pbar, Bbar, Dbar, mu1, max(first, second), float(Q))


# majorant and radius ---------------------------------------------------------


def _poly(coeffs, g):
    """Horner evaluation; works on floats, arrays and Jets."""
    out = 0.0 * g + coeffs[-1]
    for c in coeffs[-2::-1]:
        out = out * g + c
    return out


def _dpoly_coeffs(coeffs):
    c = np.asarray(coeffs, dtype=float)
    return c[1:] * np.arange(1, c.size) if c.size > 1 else np.zeros(1)


@dataclass
class MajorantSpec:
    """Majorant Ntilde(u) = sum B_i u^i with V0 = mu and factor sigma.

    ``Sigma`` defaults to sigma / (1 + sigma V0 Ntilde'(V0)); passing ``inf``
    models the limit in which the linear term of z(g) is suppressed.
    """

    B: np.ndarray
    V0: float
    sigma: float
    Sigma: float | None = None
    h_candidates: np.ndarray = field(default_factory=lambda: np.array([]))

    def __post_init__(self):
        self.B = np.atleast_1d(np.asarray(self.B, dtype=float))
        if np.any(self.B < 0):
            raise MajorantError("majorant coefficients must be non-negative")
        if not self.V0 > 0:
            raise MajorantError(f"V0 must be positive, got {self.V0!r}")
        if self.Sigma is None:
            self.Sigma = self.sigma / (1.0 + self.sigma * self.V0 * self.dN(self.V0))
        if not self.Sigma > 0:
            raise MajorantError("Sigma must be positive")

    @property
    def degree(self):
        return self.B.size - 1

    def N(self, g):
        return _poly(self.B, g)

    def dN(self, g):
        return _poly(_dpoly_coeffs(self.B), g)


def jet_eval_poly(coeffs, v0, order):
    """Taylor coefficients of sum coeffs[i] u^i about v0 up to ``order``."""
    return _poly(np.asarray(coeffs, dtype=float), Jet.variable(float(v0), order)).coeffs


def majorant_sequence(spec: MajorantSpec, m: int):
    """V_0..V_m of the scalar majorant recursion.

    Uses the explicit form V_{j+1} = sigma * {sum_{p=1..j} A_{j+1-p}(Nt) V_p
    + V_0 A_{j+1}(Nt; V_0..V_j, 0) + sum_{p=0..j} A_{j-p}(Nt' u) V_p}, which
    is the solution of the implicit Sigma-normalized recursion.
    """
    if m < 0:
        raise ValueError("order m must be >= 0")
    V = [float(spec.V0)]
    if m == 0:
        return np.array(V)
    # Nt'(u) u has coefficients i * B_i
    M = spec.B * np.arange(spec.B.size)
    jn = jet_eval_poly(spec.B, spec.V0, m)
    jm = jet_eval_poly(M, spec.V0, m)
    for j in range(m):
        v = np.array(V)
        a_n = adomian_polys(jn[: j + 1], v)
        a_m = adomian_polys(jm[: j + 1], v)
        s = sum(a_n[j + 1 - p] * V[p] for p in range(1, j + 1))
        s += V[0] * adomian_tail(jn[: j + 2], v)
        s += sum(a_m[j - p] * V[p] for p in range(0, j + 1))
        V.append(float(spec.sigma * s))
    return np.array(V)


def z_of_g(spec: MajorantSpec, g):
    """z(g) = ((g - V0)/Sigma - (Nt(g) - Nt(V0)) g) / (g^2 Nt'(g)); Jets allowed."""
    lin = 0.0 if math.isinf(spec.Sigma) else (g - spec.V0) * (1.0 / spec.Sigma)
    return (lin - (spec.N(g) - spec.N(spec.V0)) * g) / (g * g * spec.dN(g))


def _dz(spec, g):
    return float(z_of_g(spec, Jet.variable(g, 1)).coeffs[1])


@dataclass
class RadiusReport:
    g_max: float
    R: float
    mu1: float | None
    admissible_h: float | None
    slope_at_V0: float
    slope_expected: float


def _golden_max(f, a, b, rtol=1e-10):
    inv = (math.sqrt(5.0) - 1.0) / 2.0
    c, d = b - inv * (b - a), a + inv * (b - a)
    fc, fd = f(c), f(d)
    while b - a > rtol * abs(b):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - inv * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv * (b - a)
            fd = f(d)
    return (a + b) / 2.0


def radius(spec: MajorantSpec, mu1=None, samples=64) -> RadiusReport:
    """Convergence radius R = z(g_max) of the majorant generating function.

    The first interior maximum of z on g > V0 is bracketed on (V0, V0 2^t],
    t = 1..40, refined by golden section and polished by a root of z'.
    """
    if not np.any(spec.B[1:] > 0):
        raise RadiusError("no certified radius: majorant has no u-dependence")
    V0 = spec.V0
    z = lambda g: float(z_of_g(spec, g))  # noqa: E731
    slope = _dz(spec, V0)
    expected = 1.0 / (spec.sigma * V0 * V0 * spec.dN(V0))
    bracket = None
    for t in range(1, 41):
        # offsets above V0 are geometric so a maximum hugging V0 is not missed
        gs = V0 * (1.0 + np.geomspace(2.0**-45, 2.0**t - 1.0, samples * (t + 45) + 1))
        zs = np.array([z(g) for g in gs])
        i = int(np.argmax(zs))
        if zs[i] > 0 and 0 < i < gs.size - 1:
            bracket = (gs[i - 1], gs[i + 1])
            break
    if bracket is None:
        raise RadiusError("no certified radius: z(g) has no positive interior maximum")
    g = _golden_max(z, *bracket)
    lo, hi = bracket
    if _dz(spec, lo) > 0 > _dz(spec, hi):
        g = brentq(lambda t: _dz(spec, t), lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    R = z(g)
    adm = None if mu1 is None else min(mu1, R)
    return RadiusReport(g, R, mu1, adm, slope, expected)


def majorant_from_problem(p: Problem, report: ConditionReport, sigma, x_samples=2001, B=None):
    """Majorant coefficients B_i = sup_x |a_i(x)| for N polynomial in u."""
    if B is None:
        deg = polynomial_degree(p.N, "u")
        if deg is None:
            raise MajorantError("N is not polynomial in u; supply majorant coefficients explicitly")
        xs = _x_box(p, x_samples)
        c = jet_eval(p.N, xs, 0.0, deg).coeffs
        B = np.abs(c).max(axis=1)
    return MajorantSpec(np.asarray(B, dtype=float), report.mu, sigma)


# discrepancy -----------------------------------------------------------------


def _weight(p: Problem, x):
    if p.weight is None:
        return np.ones_like(np.asarray(x, dtype=float))
    return np.broadcast_to(evaluate(p.weight, x), np.shape(x))


def _residual(p, x, u, du):
    with np.errstate(all="ignore"):
        n = np.broadcast_to(evaluate(p.N, x, u), np.shape(x))
        phi = np.broadcast_to(evaluate(p.phi, x), np.shape(x))
        return _weight(p, x) * (du - n * u - phi)


def discrepancy(p: Problem, approx: PiecewiseTerm, x):
    """Weighted residual w(x) (u' - N(x,u) u - phi(x)) of the interpolant."""
    x = np.asarray(x, dtype=float)
    out = _residual(p, x, approx(x), approx.derivative(x))
    return float(out) if np.ndim(out) == 0 else np.asarray(out)


def discrepancy_samples(p: Problem, approx: PiecewiseTerm):
    """(x, nu) at every distinct sample; nodes use the panel on their left.

    Where the sampling is singular (graded x0) nu is NaN.
    """
    samp = approx.sampling
    x = samp.flat_x()
    xe = flatten_samples(samp.x_eval)
    u = flatten_samples(approx.values)
    du = flatten_samples(approx.sample_derivatives())
    try:
        nu = _residual(p, xe, u, du)
    except ExprDomainError:
        nu = np.full_like(x, np.nan)
    nu = np.where(np.isfinite(du), nu, np.nan)
    return x, nu


# reference solution ----------------------------------------------------------


class Reference:
    """Dense RK45 reference; ``x_start`` > x0 when the start is singular."""

    def __init__(self, dense, x_start, p):
        self._dense = dense
        self.x_start = x_start
        self.problem = p

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        flat = np.clip(x, self.x_start, None).ravel()
        out = np.asarray(self._dense(flat)[0]).reshape(x.shape)
        out = np.where(x <= self.problem.x0, self.problem.u0, out)
        return float(out) if out.ndim == 0 else out

    def derivative(self, x):
        """Exact derivative of the dense-output polynomial (x >= x_start)."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        d = self._dense
        idx = np.clip(np.searchsorted(d.ts, x, side="right") - 1, 0, len(d.interpolants) - 1)
        out = np.empty_like(x)
        for i in np.unique(idx):
            ip = d.interpolants[i]
            sel = idx == i
            t = (x[sel] - ip.t_old) / ip.h
            powers = np.vstack([(k + 1) * t**k for k in range(ip.Q.shape[1])])
            out[sel] = (ip.Q @ powers)[0]
        return out


def reference_discrepancy(p: Problem, ref: Reference, x):
    """Weighted residual of the reference's own dense interpolant."""
    x = np.asarray(x, dtype=float)
    return _residual(p, x, ref(x), ref.derivative(x))


def reference_solve(p: Problem, tol=1e-10, start_offset=1e-6) -> Reference:
    """Adaptive Runge-Kutta 5(4) solution with dense output (rtol = atol = tol).

    A singular left end is skipped: integration starts at x0 + start_offset
    from the first Picard iterate u0 + int (N(s,u0) u0 + phi(s)) ds.
    """
    x0, u0 = p.x0, p.u0
    if needs_grading(p):
        xs = x0 + start_offset

        def integrand(s):
            return evaluate(p.N, s, u0) * u0 + evaluate(p.phi, s)

        # s = x0 + t^2 removes inverse square-root endpoint behaviour
        val, _ = quad(lambda t: 2.0 * t * integrand(x0 + t * t), 0.0, math.sqrt(start_offset),
                      epsabs=1e-15, epsrel=1e-13)
        x0, u0 = xs, u0 + val

    def rhs(x, u):
        return evaluate(p.N, x, u[0]) * u + evaluate(p.phi, x)

    sol = solve_ivp(rhs, (x0, p.x_end), [u0], method="RK45", rtol=tol, atol=tol, dense_output=True)
    if not sol.success:
        raise AnalysisError(f"reference integration failed near x={sol.t[-1]!r}: {sol.message}")
    return Reference(sol.sol, x0, p)


def truth_function(p: Problem, ref_tol=1e-10):
    """(callable, label): the exact solution if given, else the RK reference."""
    if p.exact is not None:
        exact = p.exact
        return (lambda x: np.broadcast_to(evaluate(exact, x), np.shape(x))), "exact"
    return reference_solve(p, ref_tol), "reference"


# error reports ---------------------------------------------------------------


def geometric_ratio(errors):
    """exp of the least-squares slope of log(error) against order, or None."""
    e = np.asarray(errors, dtype=float)
    if e.size < 2 or np.any(e <= 0) or not np.all(np.isfinite(e)):
        return None
    slope = np.polyfit(np.arange(e.size), np.log(e), 1)[0]
    return float(np.exp(slope))


@dataclass
class ErrorReport:
    sup_errors: list
    x: np.ndarray
    curves: list
    ratio: float | None


def error_report(sol, truth, window=None) -> ErrorReport:
    """Sup errors truth - partial sum per order, the error curves and the
    fitted geometric ratio.  ``truth`` is an Expression or a callable of x."""
    if isinstance(truth, Expression):
        expr = truth
        truth = lambda x: np.broadcast_to(evaluate(expr, x), np.shape(x))  # noqa: E731
    samp = sol.partial_sums[0].sampling
    x = samp.flat_x()
    keep = np.ones(x.shape, dtype=bool) if window is None else (x >= window[0]) & (x <= window[1])
    x = x[keep]
    ref = np.asarray(truth(x), dtype=float)
    curves = [ref - flatten_samples(s.values)[keep] for s in sol.partial_sums]
    sups = [float(np.max(np.abs(c), initial=0.0)) for c in curves]
    return ErrorReport(sups, x, curves, geometric_ratio(sups))
