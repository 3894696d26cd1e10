"""Compiled metric kernels.

Same contract as ranksim._pykernels.  Accumulations run in dimension-index
order in 64-bit floats, so results are reproducible across runs.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport pow, sqrt

cnp.import_array()

NAME = "c"


def rank_profile(values):
    """Descending fractional ranks (1-based, ties get the mean position)."""
    cdef double[::1] v = np.ascontiguousarray(values, dtype=np.float64)
    cdef Py_ssize_t n = v.shape[0]
    order_arr = np.argsort(-np.asarray(v), kind="stable").astype(np.intp)
    cdef cnp.intp_t[::1] order = order_arr
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] ranks = out
    cdef Py_ssize_t i = 0, j, k
    cdef double avg
    while i < n:
        j = i
        while j + 1 < n and v[order[j + 1]] == v[order[i]]:
            j += 1
        avg = 0.5 * <double>(i + j) + 1.0
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    return out


def apsyn(double[::1] rx not None, double[::1] ry not None, double n_top):
    """Sum of inverse average ranks over dimensions ranked <= n_top in both."""
    cdef Py_ssize_t i, n = rx.shape[0]
    cdef double acc = 0.0
    for i in range(n):
        if rx[i] <= n_top and ry[i] <= n_top:
            acc += 2.0 / (rx[i] + ry[i])
    return acc


def apsynp(double[::1] rx not None, double[::1] ry not None, double p):
    """Power-smoothed sum over all dimensions of 2 / (rx^p + ry^p)."""
    cdef Py_ssize_t i, n = rx.shape[0]
    cdef double acc = 0.0
    if p == 1.0:
        for i in range(n):
            acc += 2.0 / (rx[i] + ry[i])
    else:
        for i in range(n):
            acc += 2.0 / (pow(rx[i], p) + pow(ry[i], p))
    return acc


def cosine(double[::1] x not None, double[::1] y not None):
    """Cosine of the angle between x and y, clamped to [-1, 1]."""
    cdef Py_ssize_t i, n = x.shape[0]
    cdef double dot = 0.0, nx = 0.0, ny = 0.0
    cdef double c
    for i in range(n):
        dot += x[i] * y[i]
        nx += x[i] * x[i]
        ny += y[i] * y[i]
    if nx == 0.0 or ny == 0.0:
        raise ValueError("cosine is undefined for a zero-norm vector")
    c = dot / sqrt(nx * ny)
    if c > 1.0:
        c = 1.0
    elif c < -1.0:
        c = -1.0
    return c


def pearson(double[::1] a not None, double[::1] b not None):
    """Pearson correlation coefficient, clamped to [-1, 1]."""
    cdef Py_ssize_t i, n = a.shape[0]
    cdef double ma = 0.0, mb = 0.0
    for i in range(n):
        ma += a[i]
        mb += b[i]
    ma /= <double>n
    mb /= <double>n
    cdef double cov = 0.0, va = 0.0, vb = 0.0
    cdef double da, db, r
    for i in range(n):
        da = a[i] - ma
        db = b[i] - mb
        cov += da * db
        va += da * da
        vb += db * db
    if va == 0.0 or vb == 0.0:
        raise ValueError("correlation is undefined when a list has zero variance")
    r = cov / sqrt(va * vb)
    if r > 1.0:
        r = 1.0
    elif r < -1.0:
        r = -1.0
    return r
