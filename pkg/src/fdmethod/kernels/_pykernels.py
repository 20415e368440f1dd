"""Pure numpy implementations of the hot kernels.

Every function mirrors the compiled module in ``_ckernels.pyx`` operation by
operation (same loop order, same association of sums) so both backends agree
to rounding.  Series arrays have shape ``(K+1, n)``: coefficient index first,
batch second.
"""

import numpy as np

BACKEND = "python"


def series_mul(a, b):
    K = a.shape[0] - 1
    c = np.empty_like(a)
    for k in range(K + 1):
        acc = a[0] * b[k]
        for i in range(1, k + 1):
            acc = acc + a[i] * b[k - i]
        c[k] = acc
    return c


def series_div(a, b, c0):
    K = a.shape[0] - 1
    c = np.empty_like(a)
    c[0] = c0
    for k in range(1, K + 1):
        acc = a[k]
        for i in range(1, k + 1):
            acc = acc - b[i] * c[k - i]
        c[k] = acc / b[0]
    return c


def series_exp(a, e0):
    K = a.shape[0] - 1
    e = np.empty_like(a)
    e[0] = e0
    for k in range(1, K + 1):
        acc = 1.0 * a[1] * e[k - 1]
        for i in range(2, k + 1):
            acc = acc + float(i) * a[i] * e[k - i]
        e[k] = acc / float(k)
    return e


def series_log(a, l0):
    K = a.shape[0] - 1
    out = np.empty_like(a)
    out[0] = l0
    for k in range(1, K + 1):
        acc = float(k) * a[k]
        for i in range(1, k):
            acc = acc - float(i) * out[i] * a[k - i]
        out[k] = acc / (float(k) * a[0])
    return out


def series_sincos(a, s0, c0):
    K = a.shape[0] - 1
    s = np.empty_like(a)
    c = np.empty_like(a)
    s[0] = s0
    c[0] = c0
    for k in range(1, K + 1):
        acc_s = 1.0 * a[1] * c[k - 1]
        acc_c = 1.0 * a[1] * s[k - 1]
        for i in range(2, k + 1):
            acc_s = acc_s + float(i) * a[i] * c[k - i]
            acc_c = acc_c + float(i) * a[i] * s[k - i]
        s[k] = acc_s / float(k)
        c[k] = -acc_c / float(k)
    return s, c


def series_sqrt(a, r0):
    K = a.shape[0] - 1
    r = np.empty_like(a)
    r[0] = r0
    for k in range(1, K + 1):
        acc = a[k]
        for i in range(1, k):
            acc = acc - r[i] * r[k - i]
        r[k] = acc / (2.0 * r[0])
    return r


def series_compose(ncoef, delta, k):
    """Coefficients 0..k of ``sum_p ncoef[p] * delta(t)**p`` with delta[0] := 0."""
    n = ncoef.shape[1]
    res = np.zeros((k + 1, n))
    res[0] = ncoef[k]
    for p in range(k - 1, -1, -1):
        nxt = np.zeros((k + 1, n))
        for m in range(1, k + 1):
            acc = res[0] * delta[m]
            for i in range(1, m):
                acc = acc + res[i] * delta[m - i]
            nxt[m] = acc
        nxt[0] = ncoef[p]
        res = nxt
    return res


def cumulative_simpson(g, d):
    """Running integral along the last axis of uniformly spaced rows.

    Even nodes get composite Simpson; odd nodes add a cubic-exact single-step
    rule to the previous even node.  Rows must have an odd length >= 3.
    """
    S = g.shape[1] - 1
    out = np.empty_like(g)
    out[:, 0] = 0.0
    w3 = d / 3.0
    w24 = d / 24.0
    if S == 2:
        out[:, 1] = (d / 12.0) * ((5.0 * g[:, 0] + 8.0 * g[:, 1]) - g[:, 2])
        out[:, 2] = w3 * ((g[:, 0] + 4.0 * g[:, 1]) + g[:, 2])
        return out
    for k in range(2, S + 1, 2):
        out[:, k] = out[:, k - 2] + w3 * ((g[:, k - 2] + 4.0 * g[:, k - 1]) + g[:, k])
    out[:, 1] = w24 * (((9.0 * g[:, 0] + 19.0 * g[:, 1]) - 5.0 * g[:, 2]) + g[:, 3])
    for k in range(3, S, 2):
        out[:, k] = out[:, k - 1] + w24 * (
            ((-g[:, k - 2] + 13.0 * g[:, k - 1]) + 13.0 * g[:, k]) - g[:, k + 1]
        )
    return out
