# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled geometry and nearest-neighbour kernels.

Both functions mirror ``_fallback`` operation for operation so the two
backends agree bit for bit.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()


cdef inline bint _hits(const double[:] p, const double[:] d,
                       const double[:] lo, const double[:] hi) noexcept nogil:
    cdef double tlo = 0.0, thi = 1.0, t1, t2, tmp
    cdef int a
    for a in range(3):
        if d[a] == 0.0:
            if not (lo[a] < p[a] < hi[a]):
                return False
        else:
            t1 = (lo[a] - p[a]) / d[a]
            t2 = (hi[a] - p[a]) / d[a]
            if t1 > t2:
                tmp = t1
                t1 = t2
                t2 = tmp
            if t1 > tlo:
                tlo = t1
            if t2 < thi:
                thi = t2
    return tlo < thi


def segments_blocked(const double[:, ::1] p1, const double[:, ::1] p2,
                     const double[:, ::1] box_min, const double[:, ::1] box_max):
    cdef Py_ssize_t n = p1.shape[0], nb = box_min.shape[0], i, b
    cdef double[:, ::1] d = np.subtract(p2, p1)
    out = np.zeros(n, dtype=np.bool_)
    cdef cnp.npy_bool[::1] res = out
    with nogil:
        for i in range(n):
            for b in range(nb):
                if _hits(p1[i], d[i], box_min[b], box_max[b]):
                    res[i] = True
                    break
    return out


def knn_select(const double[:, ::1] points, const double[::1] q, Py_ssize_t k):
    cdef Py_ssize_t n = points.shape[0], i, j, filled = 0
    cdef double dx, dy, dz, dist
    idx = np.empty(k, dtype=np.intp)
    dst = np.empty(k, dtype=np.float64)
    cdef Py_ssize_t[::1] bi = idx
    cdef double[::1] bd = dst
    with nogil:
        for i in range(n):
            dx = points[i, 0] - q[0]
            dy = points[i, 1] - q[1]
            dz = points[i, 2] - q[2]
            dist = sqrt(dx * dx + dy * dy + dz * dz)
            if filled == k and dist >= bd[k - 1]:
                continue
            # insertion keeps earlier indices ahead of later equal distances
            j = filled if filled < k else k - 1
            while j > 0 and bd[j - 1] > dist:
                if j < k:
                    bd[j] = bd[j - 1]
                    bi[j] = bi[j - 1]
                j -= 1
            bd[j] = dist
            bi[j] = i
            if filled < k:
                filled += 1
    return idx, dst
