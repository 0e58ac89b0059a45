# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: LU determinant, batched determinants, soliton subset sum."""

import numpy as np
cimport numpy as cnp
from libc.math cimport hypot

cnp.import_array()


cdef inline double cabs(double complex z) nogil:
    return hypot(z.real, z.imag)


cdef double complex _lu_det_inplace(double complex[:, ::1] a) nogil:
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t i, j, k, p
    cdef double best, cur
    cdef double complex det = 1.0, piv, l, tmp
    for k in range(n):
        p = k
        best = cabs(a[k, k])
        for i in range(k + 1, n):
            cur = cabs(a[i, k])
            if cur > best:
                best = cur
                p = i
        if best == 0.0:
            return 0.0
        if p != k:
            for j in range(n):
                tmp = a[k, j]
                a[k, j] = a[p, j]
                a[p, j] = tmp
            det = -det
        piv = a[k, k]
        det = det * piv
        for i in range(k + 1, n):
            l = a[i, k] / piv
            if l != 0:
                for j in range(k + 1, n):
                    a[i, j] = a[i, j] - l * a[k, j]
    return det


def lu_det(a):
    """Determinant of a square complex matrix by LU with partial pivoting."""
    cdef double complex[:, ::1] work = np.array(a, dtype=np.complex128, order="C", copy=True)
    if work.shape[0] != work.shape[1]:
        raise ValueError("matrix must be square")
    return complex(_lu_det_inplace(work))


def det_batch(stack):
    """Determinants of a stack of matrices, shape (m, n, n) -> (m,)."""
    cdef double complex[:, :, ::1] work = np.array(stack, dtype=np.complex128, order="C", copy=True)
    cdef Py_ssize_t m = work.shape[0], r
    out = np.empty(m, dtype=np.complex128)
    cdef double complex[::1] o = out
    with nogil:
        for r in range(m):
            o[r] = _lu_det_inplace(work[r])
    return out


def subset_sum(weights, pair):
    """Sum over all subsets J of prod_{i in J} w_i * prod_{i<k in J} pair[i, k]."""
    cdef double complex[::1] w = np.ascontiguousarray(weights, dtype=np.complex128)
    cdef double complex[:, ::1] pr = np.ascontiguousarray(pair, dtype=np.complex128)
    cdef Py_ssize_t n = w.shape[0]
    if n > 30:
        raise ValueError("subset enumeration limited to n <= 30")
    cdef Py_ssize_t size = (<Py_ssize_t> 1) << n
    terms_arr = np.empty(size, dtype=np.complex128)
    pk_arr = np.empty(max(size >> 1, 1), dtype=np.complex128)
    cdef double complex[::1] terms = terms_arr
    cdef double complex[::1] pk = pk_arr
    cdef Py_ssize_t k, i, J, half, width
    cdef double complex total = 0.0, p
    terms[0] = 1.0
    # terms[J | 1<<k] = terms[J] * w[k] * pk[J] with pk[J] = prod_{i in J} pair[i, k],
    # both tables filled by doubling over the index bits
    with nogil:
        for k in range(n):
            half = (<Py_ssize_t> 1) << k
            pk[0] = 1.0
            for i in range(k):
                width = (<Py_ssize_t> 1) << i
                p = pr[i, k]
                for J in range(width):
                    pk[width + J] = pk[J] * p
            for J in range(half):
                terms[half + J] = w[k] * terms[J] * pk[J]
        for J in range(size):
            total = total + terms[J]
    return complex(total)
