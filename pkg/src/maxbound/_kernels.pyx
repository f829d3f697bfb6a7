# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled sparse-stencil kernel for the grid maximal operators."""

import numpy as np
from cython.parallel cimport prange


cdef inline Py_ssize_t _lo(Py_ssize_t o) noexcept nogil:
    return -o if o < 0 else 0


cdef inline Py_ssize_t _hi(Py_ssize_t o, Py_ssize_t n) noexcept nogil:
    return n - o if o > 0 else n


def _apply(const double[:, :, :, ::1] f, const long[:, ::1] offsets, const double[::1] weights, int nthreads):
    cdef Py_ssize_t n0 = f.shape[0], n1 = f.shape[1], n2 = f.shape[2], n3 = f.shape[3]
    cdef Py_ssize_t ns = weights.shape[0]
    cdef Py_ssize_t i0, i1, i2, i3, s, o0, o1, o2, o3, a3, b3
    cdef double w
    out_arr = np.zeros((n0, n1, n2, n3))
    cdef double[:, :, :, ::1] out = out_arr
    # taps outermost within each slab, so every output point still sums its taps in stencil order
    for i0 in prange(n0, nogil=True, schedule="static", num_threads=nthreads):
        for s in range(ns):
            o0 = offsets[s, 0]
            if i0 + o0 < 0 or i0 + o0 >= n0:
                continue
            o1 = offsets[s, 1]
            o2 = offsets[s, 2]
            o3 = offsets[s, 3]
            a3 = _lo(o3)
            b3 = _hi(o3, n3)
            w = weights[s]
            for i1 in range(_lo(o1), _hi(o1, n1)):
                for i2 in range(_lo(o2), _hi(o2, n2)):
                    for i3 in range(a3, b3):
                        out[i0, i1, i2, i3] += w * f[i0 + o0, i1 + o1, i2 + o2, i3 + o3]
    return out_arr


def stencil_apply(f, offsets, weights, int nthreads=1):
    """``out[x] = sum_s weights[s] * f[x + offsets[s]]``, reading zero outside the array."""
    f = np.asarray(f, dtype=np.float64)
    offsets = np.asarray(offsets, dtype=np.int64)
    # singleton axes first, so the innermost loop runs over a long axis
    perm = sorted(range(4), key=lambda k: (f.shape[k] > 1, k))
    inv = np.argsort(perm)
    out = _apply(np.ascontiguousarray(f.transpose(perm)), np.ascontiguousarray(offsets[:, perm]),
                 np.ascontiguousarray(weights, dtype=np.float64), max(nthreads, 1))
    return np.ascontiguousarray(out.transpose(inv))
