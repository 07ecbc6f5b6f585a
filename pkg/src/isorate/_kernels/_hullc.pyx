# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: lower convex hull of a point sequence and weighted PAVA.

Semantics must stay bit-identical to isorate._kernels.pure; the equivalence is
enforced by tests/test_kernels.py on random inputs.
"""

import numpy as np


def lower_hull_indices(double[::1] x, double[::1] y):
    """Indices of the lower convex hull vertices of (x_i, y_i), x strictly increasing.

    Collinear middle points are dropped (cross product <= 0 pops), so segment
    slopes between returned vertices are strictly increasing.
    """
    cdef Py_ssize_t n = x.shape[0]
    cdef long[::1] stack = np.empty(n, dtype=np.int64)
    cdef Py_ssize_t top = 0, i
    cdef long a, b
    cdef double cross
    for i in range(n):
        while top >= 2:
            a = stack[top - 2]
            b = stack[top - 1]
            cross = (x[b] - x[a]) * (y[i] - y[a]) - (y[b] - y[a]) * (x[i] - x[a])
            if cross <= 0.0:
                top -= 1
            else:
                break
        stack[top] = i
        top += 1
    return np.asarray(stack[:top]).copy()


def pava_nondecreasing(double[::1] y, double[::1] w):
    """Weighted least-squares non-decreasing fit of y with positive weights w.

    Returns the fitted level per index. Adjacent pooled blocks end with
    strictly increasing means (pooling merges on >=).
    """
    cdef Py_ssize_t n = y.shape[0]
    levels = np.empty(n, dtype=np.float64)
    cdef double[::1] lev = levels
    cdef double[::1] wsum = np.empty(n, dtype=np.float64)
    cdef long[::1] start = np.empty(n, dtype=np.int64)
    cdef Py_ssize_t top = 0, i, j, k
    cdef double m, ws
    for i in range(n):
        m = y[i]
        ws = w[i]
        start[top] = i
        lev[top] = m
        wsum[top] = ws
        top += 1
        while top >= 2 and lev[top - 2] >= lev[top - 1]:
            m = (lev[top - 2] * wsum[top - 2] + lev[top - 1] * wsum[top - 1]) / (wsum[top - 2] + wsum[top - 1])
            wsum[top - 2] += wsum[top - 1]
            lev[top - 2] = m
            top -= 1
    cdef double[::1] out = np.empty(n, dtype=np.float64)
    for k in range(top):
        j = n if k == top - 1 else start[k + 1]
        for i in range(start[k], j):
            out[i] = lev[k]
    return np.asarray(out)
