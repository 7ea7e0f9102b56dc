# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled dyadic aggregation kernel."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef inline bint _inside(const long long[:, ::1] k, Py_ssize_t e, long long je,
                         const long long[:, ::1] rk, Py_ssize_t r, long long jr,
                         Py_ssize_t n) noexcept nogil:
    cdef long long s = je - jr
    cdef Py_ssize_t d
    if s < 0:
        return False
    if s > 62:
        s = 62
    for d in range(n):
        if (k[e, d] >> s) != rk[r, d]:
            return False
    return True


def subcube_reduce(const long long[::1] j, const long long[:, ::1] k, const double[::1] w,
                   const long long[::1] root_j, const long long[:, ::1] root_k, bint use_max=False):
    """For every root cube, sum (or max) of ``w`` over entries whose cube lies inside it."""
    cdef Py_ssize_t n_entries = j.shape[0]
    cdef Py_ssize_t n_roots = root_j.shape[0]
    cdef Py_ssize_t n = k.shape[1] if n_entries else root_k.shape[1]
    out_arr = np.zeros(n_roots, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t r, e
    cdef double acc
    with nogil:
        for r in range(n_roots):
            acc = 0.0
            for e in range(n_entries):
                if _inside(k, e, j[e], root_k, r, root_j[r], n):
                    if use_max:
                        if w[e] > acc:
                            acc = w[e]
                    else:
                        acc = acc + w[e]
            out[r] = acc
    return out_arr
