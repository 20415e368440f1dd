# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of ``_pykernels``.

Loop order and summation association match the numpy fallback exactly; the
extension is built with ``-ffp-contract=off`` so no fused multiply-adds creep
in and the two backends agree to the last bit on IEEE hardware.
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()

BACKEND = "cython"


def series_mul(const double[:, ::1] a, const double[:, ::1] b):
    cdef Py_ssize_t K = a.shape[0] - 1, n = a.shape[1]
    cdef Py_ssize_t j, k, i
    cdef double acc
    out = np.empty((K + 1, n))
    cdef double[:, ::1] c = out
    for j in range(n):
        for k in range(K + 1):
            acc = a[0, j] * b[k, j]
            for i in range(1, k + 1):
                acc = acc + a[i, j] * b[k - i, j]
            c[k, j] = acc
    return out


def series_div(const double[:, ::1] a, const double[:, ::1] b, c0):
    cdef Py_ssize_t K = a.shape[0] - 1, n = a.shape[1]
    cdef Py_ssize_t j, k, i
    cdef double acc
    out = np.empty((K + 1, n))
    out[0] = c0
    cdef double[:, ::1] c = out
    for j in range(n):
        for k in range(1, K + 1):
            acc = a[k, j]
            for i in range(1, k + 1):
                acc = acc - b[i, j] * c[k - i, j]
            c[k, j] = acc / b[0, j]
    return out


def series_exp(const double[:, ::1] a, e0):
    cdef Py_ssize_t K = a.shape[0] - 1, n = a.shape[1]
    cdef Py_ssize_t j, k, i
    cdef double acc
    out = np.empty((K + 1, n))
    out[0] = e0
    cdef double[:, ::1] e = out
    for j in range(n):
        for k in range(1, K + 1):
            acc = 1.0 * a[1, j] * e[k - 1, j]
            for i in range(2, k + 1):
                acc = acc + <double>i * a[i, j] * e[k - i, j]
            e[k, j] = acc / <double>k
    return out


def series_log(const double[:, ::1] a, l0):
    cdef Py_ssize_t K = a.shape[0] - 1, n = a.shape[1]
    cdef Py_ssize_t j, k, i
    cdef double acc
    out = np.empty((K + 1, n))
    out[0] = l0
    cdef double[:, ::1] lg = out
    for j in range(n):
        for k in range(1, K + 1):
            acc = <double>k * a[k, j]
            for i in range(1, k):
                acc = acc - <double>i * lg[i, j] * a[k - i, j]
            lg[k, j] = acc / (<double>k * a[0, j])
    return out


def series_sincos(const double[:, ::1] a, s0, c0):
    cdef Py_ssize_t K = a.shape[0] - 1, n = a.shape[1]
    cdef Py_ssize_t j, k, i
    cdef double acc_s, acc_c
    s_out = np.empty((K + 1, n))
    c_out = np.empty((K + 1, n))
    s_out[0] = s0
    c_out[0] = c0
    cdef double[:, ::1] s = s_out
    cdef double[:, ::1] c = c_out
    for j in range(n):
        for k in range(1, K + 1):
            acc_s = 1.0 * a[1, j] * c[k - 1, j]
            acc_c = 1.0 * a[1, j] * s[k - 1, j]
            for i in range(2, k + 1):
                acc_s = acc_s + <double>i * a[i, j] * c[k - i, j]
                acc_c = acc_c + <double>i * a[i, j] * s[k - i, j]
            s[k, j] = acc_s / <double>k
            c[k, j] = -acc_c / <double>k
    return s_out, c_out


def series_sqrt(const double[:, ::1] a, r0):
    cdef Py_ssize_t K = a.shape[0] - 1, n = a.shape[1]
    cdef Py_ssize_t j, k, i
    cdef double acc
    out = np.empty((K + 1, n))
    out[0] = r0
    cdef double[:, ::1] r = out
    for j in range(n):
        for k in range(1, K + 1):
            acc = a[k, j]
            for i in range(1, k):
                acc = acc - r[i, j] * r[k - i, j]
            r[k, j] = acc / (2.0 * r[0, j])
    return out


def series_compose(const double[:, ::1] ncoef, const double[:, ::1] delta, Py_ssize_t k):
    cdef Py_ssize_t n = ncoef.shape[1]
    cdef Py_ssize_t j, p, m, i
    cdef double acc
    out = np.zeros((k + 1, n))
    cdef double[:, ::1] res = out
    cdef double[::1] cur = np.empty(k + 1)
    cdef double[::1] nxt = np.empty(k + 1)
    for j in range(n):
        cur[0] = ncoef[k, j]
        for m in range(1, k + 1):
            cur[m] = 0.0
        for p in range(k - 1, -1, -1):
            for m in range(1, k + 1):
                acc = cur[0] * delta[m, j]
                for i in range(1, m):
                    acc = acc + cur[i] * delta[m - i, j]
                nxt[m] = acc
            nxt[0] = ncoef[p, j]
            for m in range(k + 1):
                cur[m] = nxt[m]
        for m in range(k + 1):
            res[m, j] = cur[m]
    return out


def cumulative_simpson(const double[:, ::1] g, double d):
    cdef Py_ssize_t rows = g.shape[0], S = g.shape[1] - 1
    cdef Py_ssize_t r, k
    cdef double w3 = d / 3.0, w24 = d / 24.0, w12 = d / 12.0
    out = np.empty((rows, S + 1))
    cdef double[:, ::1] o = out
    for r in range(rows):
        o[r, 0] = 0.0
        if S == 2:
            o[r, 1] = w12 * ((5.0 * g[r, 0] + 8.0 * g[r, 1]) - g[r, 2])
            o[r, 2] = w3 * ((g[r, 0] + 4.0 * g[r, 1]) + g[r, 2])
            continue
        for k in range(2, S + 1, 2):
            o[r, k] = o[r, k - 2] + w3 * ((g[r, k - 2] + 4.0 * g[r, k - 1]) + g[r, k])
        o[r, 1] = w24 * (((9.0 * g[r, 0] + 19.0 * g[r, 1]) - 5.0 * g[r, 2]) + g[r, 3])
        for k in range(3, S, 2):
            o[r, k] = o[r, k - 1] + w24 * (
                ((-g[r, k - 2] + 13.0 * g[r, k - 1]) + 13.0 * g[r, k]) - g[r, k + 1]
            )
    return out
