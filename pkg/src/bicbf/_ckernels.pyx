# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled ANOVA sums-of-squares kernels (see ``_kernels_py`` for the contract)."""

import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free

cnp.import_array()

BACKEND = "cython"


cdef int _decompose(const double[:, :, :] y, double *cell, double *row,
                    double *col, double[::1] out) noexcept nogil:
    cdef Py_ssize_t a = y.shape[0], b = y.shape[1], n = y.shape[2]
    cdef Py_ssize_t i, j, k
    cdef double s, d, grand = 0.0
    cdef double ss_a = 0.0, ss_b = 0.0, ss_ab = 0.0, ss_err = 0.0, ss_tot = 0.0

    for i in range(a):
        row[i] = 0.0
    for j in range(b):
        col[j] = 0.0
    for i in range(a):
        for j in range(b):
            s = 0.0
            for k in range(n):
                s += y[i, j, k]
            s /= n
            cell[i * b + j] = s
            row[i] += s
            col[j] += s
            grand += s
    for i in range(a):
        row[i] /= b
    for j in range(b):
        col[j] /= a
    grand /= a * b

    for i in range(a):
        d = row[i] - grand
        ss_a += d * d
    for j in range(b):
        d = col[j] - grand
        ss_b += d * d
    for i in range(a):
        for j in range(b):
            s = cell[i * b + j]
            d = s - row[i] - col[j] + grand
            ss_ab += d * d
            for k in range(n):
                d = y[i, j, k] - s
                ss_err += d * d
                d = y[i, j, k] - grand
                ss_tot += d * d

    out[0] = b * n * ss_a
    out[1] = a * n * ss_b
    out[2] = n * ss_ab
    out[3] = ss_err
    out[4] = ss_tot
    return 0


def anova_ss_batch(values):
    """Balanced two-way decomposition for a stack ``(r, a, b, n)`` -> ``(r, 5)``."""
    cdef const double[:, :, :, :] y = np.ascontiguousarray(values, dtype=np.float64)
    if y.ndim != 4:
        raise ValueError("expected a 4-d array")
    cdef Py_ssize_t r = y.shape[0], a = y.shape[1], b = y.shape[2], t
    result = np.empty((r, 5), dtype=np.float64)
    cdef double[:, ::1] out = result
    cdef double *buf = <double *> malloc((a * b + a + b) * sizeof(double))
    if buf == NULL:
        raise MemoryError()
    try:
        with nogil:
            for t in range(r):
                _decompose(y[t], buf, buf + a * b, buf + a * b + a, out[t])
    finally:
        free(buf)
    return result


def anova_ss(values):
    """Single-dataset form of :func:`anova_ss_batch`; ``values`` is ``(a, b, n)``."""
    y = np.asarray(values, dtype=np.float64)
    return anova_ss_batch(y[None])[0]
