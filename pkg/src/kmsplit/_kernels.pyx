# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled array kernels for the iteration hot path.

Mirror of the NumPy fallback in ``_kernels_np``; single pass, no temporary
arrays.  Inputs are C-contiguous float64 arrays of equal length.
"""

from libc.math cimport sqrt

import numpy as np
cimport numpy as cnp

cnp.import_array()

BACKEND = "cython"


def dot_w(const double[::1] w, const double[::1] x, const double[::1] y):
    """Weighted inner product sum(w*x*y)."""
    cdef Py_ssize_t i, n = w.shape[0]
    cdef double acc = 0.0
    for i in range(n):
        acc += w[i] * x[i] * y[i]
    return acc


def norm_w(const double[::1] w, const double[::1] x):
    """Weighted 2-norm sqrt(sum(w*x*x))."""
    cdef Py_ssize_t i, n = w.shape[0]
    cdef double acc = 0.0
    for i in range(n):
        acc += w[i] * x[i] * x[i]
    return sqrt(acc) if acc > 0.0 else 0.0


def diff_norm_w(const double[::1] w, const double[::1] x, const double[::1] y):
    """Weighted 2-norm of x - y without materializing the difference."""
    cdef Py_ssize_t i, n = w.shape[0]
    cdef double acc = 0.0, d
    for i in range(n):
        d = x[i] - y[i]
        acc += w[i] * d * d
    return sqrt(acc) if acc > 0.0 else 0.0


def weighted_sum(const double[::1] w, const double[::1] x):
    """sum(w*x), the quadrature integral."""
    cdef Py_ssize_t i, n = w.shape[0]
    cdef double acc = 0.0
    for i in range(n):
        acc += w[i] * x[i]
    return acc


def scale(double a, const double[::1] x):
    """a*x as a new array."""
    cdef Py_ssize_t i, n = x.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    for i in range(n):
        out[i] = a * x[i]
    return out_arr


def axpby(double a, const double[::1] x, double b, const double[::1] y):
    """a*x + b*y as a new array."""
    cdef Py_ssize_t i, n = x.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    for i in range(n):
        out[i] = a * x[i] + b * y[i]
    return out_arr


def add_scalar(const double[::1] x, double c):
    """x + c as a new array."""
    cdef Py_ssize_t i, n = x.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    for i in range(n):
        out[i] = x[i] + c
    return out_arr


def cumint_forward(const double[::1] u, const double[::1] w):
    """out[i] = sum_{j<i} w[j]*u[j] + 0.5*w[i]*u[i], one pass."""
    cdef Py_ssize_t i, n = u.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double acc = 0.0, wu
    for i in range(n):
        wu = w[i] * u[i]
        out[i] = acc + 0.5 * wu
        acc += wu
    return out_arr


def cumint_reverse(const double[::1] u, const double[::1] w):
    """out[i] = sum_{j>i} w[j]*u[j] + 0.5*w[i]*u[i], one pass."""
    cdef Py_ssize_t i, n = u.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double acc = 0.0, wu
    for i in range(n - 1, -1, -1):
        wu = w[i] * u[i]
        out[i] = acc + 0.5 * wu
        acc += wu
    return out_arr
