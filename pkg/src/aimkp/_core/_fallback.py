"""Pure numpy implementations of the hot kernels.

Same signatures as the compiled ``_kernels`` extension; selected at import
time when the extension is unavailable or ``AIMKP_PURE_PYTHON`` is set.
"""

import numpy as np


def lu_det(a):
    """Determinant of a square complex matrix by LU with partial pivoting."""
    a = np.array(a, dtype=np.complex128, copy=True)
    n = a.shape[0]
    det = 1.0 + 0.0j
    for k in range(n):
        p = k + int(np.argmax(np.abs(a[k:, k])))
        piv = a[p, k]
        if piv == 0:
            return 0.0j
        if p != k:
            a[[k, p]] = a[[p, k]]
            det = -det
        det *= piv
        if k + 1 < n:
            l = a[k + 1:, k] / piv
            a[k + 1:, k + 1:] -= np.outer(l, a[k, k + 1:])
    return complex(det)


def det_batch(stack):
    """Determinants of a stack of matrices, shape (m, n, n) -> (m,)."""
    stack = np.asarray(stack, dtype=np.complex128)
    return np.array([lu_det(m) for m in stack], dtype=np.complex128)


def subset_sum(weights, pair):
    """Sum over all subsets J of prod_{i in J} w_i * prod_{i<k in J} pair[i, k].

    Subsets are enumerated by doubling on the lowest unused index, so the
    memory footprint is O(2**n) complex numbers.
    """
    w = np.asarray(weights, dtype=np.complex128)
    pair = np.asarray(pair, dtype=np.complex128)
    n = w.shape[0]
    terms = np.ones(1, dtype=np.complex128)
    for k in range(n):
        # pk[J] = prod_{i in J} pair[i, k] for J subset of {0..k-1}
        pk = np.ones(1, dtype=np.complex128)
        for i in range(k):
            pk = np.concatenate((pk, pk * pair[i, k]))
        terms = np.concatenate((terms, terms * (w[k] * pk)))
    return complex(np.sum(terms))
