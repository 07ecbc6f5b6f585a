"""Pure-Python twins of the compiled kernels.

Same algorithms, same float operation order as _hullc.pyx so both backends
produce bit-identical output; only the speed differs.
"""

import numpy as np


def lower_hull_indices(x, y):
    """Indices of the lower convex hull vertices of (x_i, y_i), x strictly increasing.

    Collinear middle points are dropped (cross product <= 0 pops), so segment
    slopes between returned vertices are strictly increasing.
    """
    n = len(x)
    stack = np.empty(n, dtype=np.int64)
    top = 0
    for i in range(n):
        xi = x[i]
        yi = y[i]
        while top >= 2:
            a = stack[top - 2]
            b = stack[top - 1]
            if (x[b] - x[a]) * (yi - y[a]) - (y[b] - y[a]) * (xi - x[a]) <= 0.0:
                top -= 1
            else:
                break
        stack[top] = i
        top += 1
    return stack[:top].copy()


def pava_nondecreasing(y, w):
    """Weighted least-squares non-decreasing fit of y with positive weights w.

    Returns the fitted level per index. Adjacent pooled blocks end with
    strictly increasing means (pooling merges on >=).
    """
    n = len(y)
    lev = np.empty(n, dtype=np.float64)
    wsum = np.empty(n, dtype=np.float64)
    start = np.empty(n, dtype=np.int64)
    top = 0
    for i in range(n):
        start[top] = i
        lev[top] = y[i]
        wsum[top] = w[i]
        top += 1
        while top >= 2 and lev[top - 2] >= lev[top - 1]:
            lev[top - 2] = (lev[top - 2] * wsum[top - 2] + lev[top - 1] * wsum[top - 1]) / (
                wsum[top - 2] + wsum[top - 1]
            )
            wsum[top - 2] += wsum[top - 1]
            top -= 1
    out = np.empty(n, dtype=np.float64)
    for k in range(top):
        j = n if k == top - 1 else start[k + 1]
        out[start[k]:j] = lev[k]
    return out
