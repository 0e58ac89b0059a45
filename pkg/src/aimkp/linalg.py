"""Dense complex linear algebra used by every other module.

Matrices are plain ``numpy`` arrays of dtype ``complex128``; :func:`as_matrix`
is the single entry point that validates shape and finiteness.  The
determinant runs on the compiled LU kernel from :mod:`aimkp._core` (or its
numpy fallback), the exponential is a Pade-13 scaling and squaring scheme,
and eigen/singular value problems delegate to LAPACK through numpy.
"""

import numpy as np

from . import _core
from .errors import DegenerateSpectrum, DimensionMismatch, ExpmOverflow, IllConditioned

__all__ = [
    "DEFAULT_RANK_TOL",
    "MAX_COND",
    "as_matrix",
    "as_vector",
    "det",
    "expm",
    "eig",
    "singular_values",
    "numerical_rank",
    "roundoff_floor",
    "adjugate",
    "check_invertible",
    "inv",
    "commutator",
]

#: singular values below ``DEFAULT_RANK_TOL * s_max`` count as zero
DEFAULT_RANK_TOL = 1e-9
#: condition estimate above which a matrix is treated as non-invertible
MAX_COND = 1e12
#: eigenvector-matrix condition number above which ``eig`` refuses
MAX_EIG_COND = 1e10


def as_matrix(a, name="matrix"):
    """Return ``a`` as a square, finite ``complex128`` array (n >= 1)."""
    arr = np.asarray(a, dtype=np.complex128)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
        raise DimensionMismatch(f"{name} must be a non-empty square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    return arr


def as_vector(v, name="vector"):
    arr = np.atleast_1d(np.asarray(v, dtype=np.complex128))
    if arr.ndim != 1:
        raise DimensionMismatch(f"{name} must be one-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    return arr


def det(a):
    """Determinant by LU with partial pivoting; exactly 0 for a zero pivot column."""
    return _core.lu_det(as_matrix(a))


# Pade coefficients and backward-error thresholds (Higham 2005).
_PADE = {
    3: (120.0, 60.0, 12.0, 1.0),
    5: (30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0),
    7: (17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0),
    9: (17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
        2162160.0, 110880.0, 3960.0, 90.0, 1.0),
    13: (64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
         1187353796428800.0, 129060195264000.0, 10559470521600.0,
         670442572800.0, 33522128640.0, 1323241920.0, 40840800.0, 960960.0,
         16380.0, 182.0, 1.0),
}
_THETA = {3: 1.495585217958292e-2, 5: 2.539398330063230e-1, 7: 9.504178996162932e-1,
          9: 2.097847961257068e0, 13: 5.371920351148152e0}
_MAX_SQUARINGS = 1000


def _pade_uv(a, m):
    n = a.shape[0]
    ident = np.eye(n, dtype=np.complex128)
    b = _PADE[m]
    a2 = a @ a
    if m == 13:
        a4 = a2 @ a2
        a6 = a4 @ a2
        u = a @ (a6 @ (b[13] * a6 + b[11] * a4 + b[9] * a2)
                 + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident)
        v = (a6 @ (b[12] * a6 + b[10] * a4 + b[8] * a2)
             + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident)
        return u, v
    powers = [ident, a2]
    for _ in range(2, (m + 1) // 2):
        powers.append(powers[-1] @ a2)
    u = a @ sum(b[2 * k + 1] * powers[k] for k in range((m + 1) // 2))
    v = sum(b[2 * k] * powers[k] for k in range((m + 1) // 2))
    return u, v


def expm(a):
    """Matrix exponential by scaling and squaring with a diagonal Pade approximant.

    Raises
    ------
    ExpmOverflow
        If the result (or an intermediate square) is not finite.
    """
    a = as_matrix(a)
    norm = np.linalg.norm(a, 1)
    if norm == 0:
        return np.eye(a.shape[0], dtype=np.complex128)
    for m in (3, 5, 7, 9):
        if norm <= _THETA[m]:
            u, v = _pade_uv(a, m)
            return np.linalg.solve(v - u, v + u)
    s = max(0, int(np.ceil(np.log2(norm / _THETA[13]))))
    if s > _MAX_SQUARINGS:
        raise ExpmOverflow(f"matrix norm {norm:.3g} too large for expm")
    u, v = _pade_uv(a / 2.0**s, 13)
    r = np.linalg.solve(v - u, v + u)
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(s):
            r = r @ r
    if not np.all(np.isfinite(r)):
        raise ExpmOverflow(f"expm overflowed (norm {norm:.3g})")
    return r


def eig(a, max_cond=MAX_EIG_COND):
    """Eigenvalues and right eigenvectors, in a deterministic order.

    Returns ``(w, V)`` with ``a @ V = V @ diag(w)``; in the notation
    ``a = U^-1 diag(w) U`` the diagonaliser is ``U = inv(V)``.  Eigenvalues
    are sorted by real part, then imaginary part, then original index.

    Raises
    ------
    DegenerateSpectrum
        If the eigenvector matrix has condition number above ``max_cond``.
    """
    a = as_matrix(a)
    w, vecs = np.linalg.eig(a)
    order = np.lexsort((np.arange(w.size), w.imag, w.real))
    w = w[order]
    vecs = vecs[:, order]
    cond = np.linalg.cond(vecs)
    if not np.isfinite(cond) or cond > max_cond:
        raise DegenerateSpectrum(f"eigenvector matrix condition {cond:.3g} exceeds {max_cond:.3g}")
    return w, vecs


def singular_values(a):
    return np.linalg.svd(as_matrix(a), compute_uv=False)


def numerical_rank(a, tol=DEFAULT_RANK_TOL, floor=0.0):
    """Number of singular values above ``max(tol * s_max, floor)``.

    ``floor`` is an absolute cutoff for matrices that are pure rounding
    noise, where a purely relative test would count every singular value.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    s = singular_values(a)
    if s[0] == 0:
        return 0
    return int(np.count_nonzero(s > max(tol * s[0], floor)))


def roundoff_floor(*factors):
    """Rounding-level magnitude of a sum of products of the given matrices."""
    n = max(np.asarray(f).shape[0] for f in factors)
    return 64 * n * np.finfo(float).eps * float(np.prod([np.linalg.norm(f, 2) for f in factors]))


def adjugate(a):
    """Classical adjoint, well defined for singular input.

    Uses ``a = U S V^H`` so that ``adj(a) = det(U) det(V^H) V adj(S) U^H``
    where ``adj(S)`` holds the products of all-but-one singular values.
    """
    a = as_matrix(a)
    n = a.shape[0]
    if n == 1:
        return np.ones((1, 1), dtype=np.complex128)
    u, s, vh = np.linalg.svd(a)
    prefix = np.concatenate(([1.0], np.cumprod(s[:-1])))
    suffix = np.concatenate((np.cumprod(s[::-1][:-1])[::-1], [1.0]))
    adj_s = prefix * suffix
    phase = _core.lu_det(u) * _core.lu_det(vh)
    return phase * (vh.conj().T * adj_s) @ u.conj().T


def check_invertible(a, name="matrix", max_cond=MAX_COND):
    a = as_matrix(a, name)
    cond = np.linalg.cond(a)
    if not np.isfinite(cond) or cond > max_cond:
        raise IllConditioned(f"{name} has condition estimate {cond:.3g} > {max_cond:.3g}")
    return a


def inv(a, name="matrix", max_cond=MAX_COND):
    a = check_invertible(a, name, max_cond)
    return np.linalg.solve(a, np.eye(a.shape[0], dtype=np.complex128))


def commutator(a, b):
    return a @ b - b @ a
