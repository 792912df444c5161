# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled periodic stencil sum (see ``_core_py`` for the reference version)."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


def stencil_sum(const double[:, :, ::1] src, const long[:, ::1] offsets,
                const double[::1] weights):
    """out[x] = sum_s weights[s] * src[x - offsets[s]] with periodic wrap."""
    cdef Py_ssize_t n0 = src.shape[0], n1 = src.shape[1], n2 = src.shape[2]
    cdef Py_ssize_t ns = offsets.shape[0]
    cdef Py_ssize_t s, i, j, k, si, sj, sk
    cdef double w
    out_arr = np.zeros((n0, n1, n2), dtype=np.float64)
    cdef double[:, :, ::1] out = out_arr
    cdef long[::1] jidx = np.empty(n1, dtype=np.int64)
    cdef long[::1] kidx = np.empty(n2, dtype=np.int64)
    for s in range(ns):
        w = weights[s]
        if w == 0.0:
            continue
        for j in range(n1):
            jidx[j] = ((j - offsets[s, 1]) % n1 + n1) % n1
        for k in range(n2):
            kidx[k] = ((k - offsets[s, 2]) % n2 + n2) % n2
        for i in range(n0):
            si = ((i - offsets[s, 0]) % n0 + n0) % n0
            for j in range(n1):
                sj = jidx[j]
                if n2 == 1:
                    out[i, j, 0] += w * src[si, sj, 0]
                else:
                    for k in range(n2):
                        out[i, j, k] += w * src[si, sj, kidx[k]]
    return out_arr
