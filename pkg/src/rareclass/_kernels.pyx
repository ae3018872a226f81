# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; see _kernels_py.py for the reference semantics."""

import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free, qsort
from libc.math cimport INFINITY, NAN

cnp.import_array()

NAME = "native"

ctypedef struct Pair:
    double v
    int y


cdef int _cmp_pair(const void *pa, const void *pb) noexcept nogil:
    cdef double a = (<Pair *> pa).v
    cdef double b = (<Pair *> pb).v
    if a < b:
        return -1
    if a > b:
        return 1
    return 0


def best_split(const double[:, :] X, const signed char[:] y, rows, order, Py_ssize_t mtry):
    cdef const cnp.npy_intp[:] r = np.ascontiguousarray(rows, dtype=np.intp)
    cdef const cnp.npy_intp[:] o = np.ascontiguousarray(order, dtype=np.intp)
    cdef Py_ssize_t m = r.shape[0]
    cdef Py_ssize_t n_order = o.shape[0]
    cdef Py_ssize_t i, k, f, visited = 0
    cdef long long n1 = 0, l1, l0, nl, nr, r1, r0
    cdef double s, sf, tf, a, b, t, vmin, vmax, v
    cdef Py_ssize_t best_f = -1
    cdef double best_t = NAN, best_s = INFINITY
    cdef Pair *buf

    if m < 2:
        return -1, NAN, INFINITY
    buf = <Pair *> malloc(m * sizeof(Pair))
    if buf == NULL:
        raise MemoryError()
    with nogil:
        for i in range(m):
            n1 += y[r[i]]
        for k in range(n_order):
            if visited >= mtry:
                break
            f = o[k]
            vmin = X[r[0], f]
            vmax = vmin
            for i in range(m):
                v = X[r[i], f]
                buf[i].v = v
                buf[i].y = y[r[i]]
                if v < vmin:
                    vmin = v
                if v > vmax:
                    vmax = v
            if not vmin < vmax:
                continue
            visited += 1
            qsort(buf, m, sizeof(Pair), _cmp_pair)
            l1 = 0
            sf = INFINITY
            tf = NAN
            for i in range(m - 1):
                l1 += buf[i].y
                if not buf[i].v < buf[i + 1].v:
                    continue
                nl = i + 1
                l0 = nl - l1
                nr = m - nl
                r1 = n1 - l1
                r0 = nr - r1
                s = (<double> (l1 * l0)) / (<double> nl) + (<double> (r1 * r0)) / (<double> nr)
                if s < sf:
                    sf = s
                    a = buf[i].v
                    b = buf[i + 1].v
                    t = (a + b) * 0.5
                    if not (a < t and t <= b):
                        t = b
                    tf = t
            if sf < best_s or (sf == best_s and f < best_f):
                best_f = f
                best_t = tf
                best_s = sf
    free(buf)
    return best_f, best_t, best_s


def apply_tree(const double[:, :] X, const int[:] feature, const double[:] threshold,
               const int[:] left, const int[:] right):
    cdef Py_ssize_t n = X.shape[0]
    out = np.empty(n, dtype=np.intp)
    cdef cnp.npy_intp[:] res = out
    cdef Py_ssize_t i
    cdef int node, f
    with nogil:
        for i in range(n):
            node = 0
            f = feature[0]
            while f >= 0:
                if X[i, f] < threshold[node]:
                    node = left[node]
                else:
                    node = right[node]
                f = feature[node]
            res[i] = node
    return out


def kendall_counts(a, b):
    cdef const double[:] x = np.ascontiguousarray(a, dtype=np.float64)
    cdef const double[:] z = np.ascontiguousarray(b, dtype=np.float64)
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t i, j
    cdef long long s = 0, ta = 0, tb = 0
    cdef int sa, sb
    cdef double d
    with nogil:
        for i in range(n - 1):
            for j in range(i + 1, n):
                d = x[j] - x[i]
                sa = (d > 0) - (d < 0)
                d = z[j] - z[i]
                sb = (d > 0) - (d < 0)
                s += sa * sb
                if sa == 0:
                    ta += 1
                if sb == 0:
                    tb += 1
    return int(s), int(ta), int(tb)
