# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled pooling scan kernel (hot inner loop of the whole toolkit).

Mirrors alsp._pool_py.pool_boundaries exactly: float64 accumulation over
float32 rows, zero-norm tokens compare as 0.0.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()

cdef double _ZERO_EPS = 1e-12


def pool_boundaries(cnp.ndarray[cnp.float32_t, ndim=2, mode="c"] data,
                    double tau, Py_ssize_t omega):
    """Group start indices for the greedy lookback-window merging scan."""
    cdef Py_ssize_t T = data.shape[0]
    cdef Py_ssize_t d = data.shape[1]
    out = np.empty(max(T, 1), dtype=np.int64)
    cdef cnp.int64_t[::1] bnd = out
    if T == 0:
        return out[:0]

    norms_arr = np.empty(T, dtype=np.float64)
    cdef double[::1] norms = norms_arr
    cdef const float[:, ::1] rows = data

    cdef Py_ssize_t t, j, i, lo, k
    cdef double acc, s, s_max, denom
    for t in range(T):
        acc = 0.0
        for i in range(d):
            acc += <double>rows[t, i] * <double>rows[t, i]
        norms[t] = sqrt(acc)

    cdef Py_ssize_t nb = 1
    cdef Py_ssize_t group_start = 0
    bnd[0] = 0
    for t in range(1, T):
        k = t - group_start
        if k > omega:
            k = omega
        lo = t - k
        s_max = 0.0
        if norms[t] >= _ZERO_EPS:
            s_max = -2.0
            for j in range(lo, t):
                if norms[j] < _ZERO_EPS:
                    s = 0.0
                else:
                    acc = 0.0
                    for i in range(d):
                        acc += <double>rows[t, i] * <double>rows[j, i]
                    s = acc / (norms[t] * norms[j])
                if s > s_max:
                    s_max = s
        if s_max >= tau:
            continue
        bnd[nb] = t
        nb += 1
        group_start = t
    return out[:nb].copy()
