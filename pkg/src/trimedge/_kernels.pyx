# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled per-sample kernels; contract matches ``_kernels_py``."""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs

cnp.import_array()

BACKEND = "compiled"


def batch_trimmed_mean(double[:, ::1] s, int k, int m):
    cdef Py_ssize_t rows = s.shape[0]
    cdef Py_ssize_t i, j
    cdef double acc
    out_arr = np.empty(rows, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double inv = 1.0 / (m - k + 1)
    for i in range(rows):
        acc = 0.0
        for j in range(k - 1, m):
            acc += s[i, j]
        out[i] = acc * inv
    return out_arr


def batch_plugin_moments(double[:, ::1] s, int k, int m):
    cdef Py_ssize_t rows = s.shape[0]
    cdef Py_ssize_t n = s.shape[1]
    cdef Py_ssize_t i, j
    cdef double wk = <double>k / n
    cdef double wm = <double>(n - m + 1) / n
    cdef double inv_n = 1.0 / n
    cdef double mu, v2, v3, acc, d, xk, xm
    mu_arr = np.empty(rows, dtype=np.float64)
    s2_arr = np.empty(rows, dtype=np.float64)
    g3_arr = np.empty(rows, dtype=np.float64)
    cdef double[::1] mu_out = mu_arr
    cdef double[::1] s2_out = s2_arr
    cdef double[::1] g3_out = g3_arr
    for i in range(rows):
        xk = s[i, k - 1]
        xm = s[i, m - 1]
        acc = 0.0
        for j in range(k, m - 1):
            acc += s[i, j]
        mu = wk * xk + acc * inv_n + wm * xm
        d = xk - mu
        v2 = wk * d * d
        v3 = wk * d * d * d
        for j in range(k, m - 1):
            d = s[i, j] - mu
            v2 += d * d * inv_n
            v3 += d * d * d * inv_n
        d = xm - mu
        v2 += wm * d * d
        v3 += wm * d * d * d
        mu_out[i] = mu
        s2_out[i] = v2
        g3_out[i] = v3
    return mu_arr, s2_arr, g3_arr


def batch_density_counts(double[:, ::1] s, int r, double half_width):
    cdef Py_ssize_t rows = s.shape[0]
    cdef Py_ssize_t n = s.shape[1]
    cdef Py_ssize_t i, j
    cdef double c
    cdef long cnt
    out_arr = np.empty(rows, dtype=np.int64)
    cdef long[::1] out = out_arr
    for i in range(rows):
        c = s[i, r - 1]
        cnt = 0
        for j in range(n):
            if fabs(s[i, j] - c) <= half_width:
                cnt += 1
        out[i] = cnt
    return out_arr


def step_sup_distance(double[::1] sorted_values, double[::1] target_values):
    cdef Py_ssize_t mm = sorted_values.shape[0]
    cdef Py_ssize_t i
    cdef double inv = 1.0 / mm
    cdef double best = 0.0
    cdef double t, d
    for i in range(mm):
        t = target_values[i]
        d = fabs((i + 1) * inv - t)
        if d > best:
            best = d
        d = fabs(i * inv - t)
        if d > best:
            best = d
    return best
