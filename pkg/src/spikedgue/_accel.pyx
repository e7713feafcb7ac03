# cython: language_level=3
"""Compiled inner loops.

Every function here has a numpy twin in ``_accel_py`` with the same signature
and semantics; ``spikedgue.accel`` picks one at import time.
"""
import numpy as np

cimport numpy as cnp
from libc.math cimport exp, fabs, log

cnp.import_array()


def log_ratio_sum(double x0, const double[::1] num, const double[::1] den, Py_ssize_t skip=-1):
    """Return ``(sum log|x0 - num| - sum log|x0 - den|, sign)``.

    ``den[skip]`` is left out when ``skip >= 0``. A zero factor anywhere
    raises ZeroDivisionError.
    """
    cdef Py_ssize_t i
    cdef double acc = 0.0, d
    cdef int sign = 1
    for i in range(num.shape[0]):
        d = x0 - num[i]
        if d == 0.0:
            raise ZeroDivisionError("zero numerator factor")
        if d < 0.0:
            sign = -sign
        acc += log(fabs(d))
    for i in range(den.shape[0]):
        if i == skip:
            continue
        d = x0 - den[i]
        if d == 0.0:
            raise ZeroDivisionError("zero denominator factor")
        if d < 0.0:
            sign = -sign
        acc -= log(fabs(d))
    return acc, sign


def step_tail(const double[::1] lefts, const double[::1] rights, const double[::1] xs):
    """Length of the union of ``(lefts[i], rights[i]]`` above each ``x``."""
    cdef Py_ssize_t i, g, n = lefts.shape[0], m = xs.shape[0]
    cdef double x, lo, total
    out = np.empty(m, dtype=np.float64)
    cdef double[::1] res = out
    for g in range(m):
        x = xs[g]
        total = 0.0
        for i in range(n):
            lo = lefts[i] if lefts[i] > x else x
            if rights[i] > lo:
                total += rights[i] - lo
        res[g] = total
    return out


def cauchy_sum(const double complex[::1] fu, const double complex[::1] u,
               const double complex[::1] gv, const double complex[::1] v):
    """Return ``(sum_ij fu_i gv_j / (u_i - v_j), sum_ij |same|)``."""
    cdef Py_ssize_t i, j, n = u.shape[0], m = v.shape[0]
    cdef double complex total = 0.0, row, term, ui, fi
    cdef double atotal = 0.0, arow
    for i in range(n):
        ui = u[i]
        fi = fu[i]
        row = 0.0
        arow = 0.0
        for j in range(m):
            term = gv[j] / (ui - v[j])
            row = row + term
            arow += abs(term)
        total = total + fi * row
        atotal += abs(fi) * arow
    return complex(total), atotal


def gaussian_kde_grid(const double[::1] samples, const double[::1] grid, double bandwidth):
    """Gaussian kernel density of ``samples`` evaluated on ``grid``."""
    cdef Py_ssize_t i, g, n = samples.shape[0], m = grid.shape[0]
    cdef double inv_h = 1.0 / bandwidth, z, acc
    cdef double norm = 1.0 / (n * bandwidth * 2.5066282746310002)
    out = np.empty(m, dtype=np.float64)
    cdef double[::1] res = out
    for g in range(m):
        acc = 0.0
        for i in range(n):
            z = (grid[g] - samples[i]) * inv_h
            if z < 40.0 and z > -40.0:
                acc += exp(-0.5 * z * z)
        res[g] = acc * norm
    return out
