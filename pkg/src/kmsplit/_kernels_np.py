"""Pure-NumPy implementations of the hot array kernels.

Same contract as the compiled module ``kmsplit._kernels``; whichever is
importable gets selected by :mod:`kmsplit._backend`.  All functions expect
C-contiguous float64 arrays of equal length and return Python floats or new
float64 arrays.
"""

import numpy as np

BACKEND = "numpy"


def dot_w(w, x, y):
    """Weighted inner product sum(w*x*y)."""
    return float(np.dot(w * x, y))


def norm_w(w, x):
    """Weighted 2-norm sqrt(sum(w*x*x))."""
    s = float(np.dot(w * x, x))
    return np.sqrt(s) if s > 0.0 else 0.0


def diff_norm_w(w, x, y):
    """Weighted 2-norm of x - y without keeping the difference."""
    d = x - y
    s = float(np.dot(w * d, d))
    return np.sqrt(s) if s > 0.0 else 0.0


def weighted_sum(w, x):
    """sum(w*x), the quadrature integral."""
    return float(np.dot(w, x))


def scale(a, x):
    """a*x as a new array."""
    return a * x


def axpby(a, x, b, y):
    """a*x + b*y as a new array."""
    return a * x + b * y


def add_scalar(x, c):
    """x + c as a new array."""
    return x + c


def cumint_forward(u, w):
    """Running quadrature integral with a half-cell at the current node.

    out[i] = sum_{j<i} w[j]*u[j] + 0.5*w[i]*u[i]
    """
    c = np.cumsum(w * u)
    return c - 0.5 * (w * u)


def cumint_reverse(u, w):
    """Reverse running integral: out[i] = sum_{j>i} w[j]*u[j] + 0.5*w[i]*u[i]."""
    wu = w * u
    c = np.cumsum(wu[::-1])[::-1]
    return c - 0.5 * wu
