# cython: language_level=3
"""Compiled kernels for pairwise distances and powered inverse-distance weights.

Twin of _kernels_py.py; same formulas, same overflow guard, loop-level
implementation.  Selected automatically at import when built.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, log, pow, sqrt

cnp.import_array()

BACKEND_NAME = "compiled"

cdef double MAX_SAFE_EXP = 690.0


def sq_euclidean(double[:, ::1] x, double[:, ::1] y):
    cdef Py_ssize_t t = x.shape[0], s = y.shape[0], d = x.shape[1]
    cdef Py_ssize_t i, j, k
    cdef double acc, diff
    out_arr = np.empty((t, s), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    for i in range(t):
        for j in range(s):
            acc = 0.0
            for k in range(d):
                diff = x[i, k] - y[j, k]
                acc += diff * diff
            out[i, j] = acc
    return out_arr


def cosine_distance(double[:, ::1] x, double[:, ::1] y):
    cdef Py_ssize_t t = x.shape[0], s = y.shape[0], d = x.shape[1]
    cdef Py_ssize_t i, j, k
    cdef double dot, dval
    nx_arr = np.empty(t, dtype=np.float64)
    ny_arr = np.empty(s, dtype=np.float64)
    cdef double[::1] nx = nx_arr
    cdef double[::1] ny = ny_arr
    for i in range(t):
        dot = 0.0
        for k in range(d):
            dot += x[i, k] * x[i, k]
        nx[i] = sqrt(dot)
    for j in range(s):
        dot = 0.0
        for k in range(d):
            dot += y[j, k] * y[j, k]
        ny[j] = sqrt(dot)
    out_arr = np.empty((t, s), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    for i in range(t):
        for j in range(s):
            dot = 0.0
            for k in range(d):
                dot += x[i, k] * y[j, k]
            dval = 1.0 - dot / (nx[i] * ny[j])
            if dval < 0.0:
                dval = 0.0
            elif dval > 2.0:
                dval = 2.0
            out[i, j] = dval
    return out_arr


def powered_weights(double[:, ::1] dist, double p, double epsilon):
    cdef Py_ssize_t t = dist.shape[0], s = dist.shape[1]
    cdef Py_ssize_t i, j
    cdef double w, wmax_global = 0.0, row_max
    weights_arr = np.empty((t, s), dtype=np.float64)
    scale_arr = np.zeros(t, dtype=np.float64)
    cdef double[:, ::1] weights = weights_arr
    cdef double[::1] scale = scale_arr
    for i in range(t):
        for j in range(s):
            w = 1.0 / (dist[i, j] + epsilon)
            weights[i, j] = w
            if w > wmax_global:
                wmax_global = w
    if t == 0 or s == 0 or wmax_global <= 0.0 or p * max(0.0, log(wmax_global)) < MAX_SAFE_EXP:
        for i in range(t):
            for j in range(s):
                weights[i, j] = pow(weights[i, j], p)
        return weights_arr, scale_arr
    for i in range(t):
        row_max = 0.0
        for j in range(s):
            if weights[i, j] > row_max:
                row_max = weights[i, j]
        for j in range(s):
            weights[i, j] = pow(weights[i, j] / row_max, p)
        scale[i] = p * log(row_max)
    return weights_arr, scale_arr
