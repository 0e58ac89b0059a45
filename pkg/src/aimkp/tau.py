"""Tau-functions ``det(X e^{g(Z)} + e^{g(Y)})`` and the identities they satisfy.

Miwa shifts ``t -> t - [1/a]`` are applied exactly: they act on the
exponentials as right multiplication by ``I - W/a``, so no log series is ever
truncated in an identity check.
"""

import itertools
from dataclasses import dataclass

import numpy as np

from . import _core
from .errors import PreconditionError, SingularTau
from .linalg import as_matrix, det, expm
from .times import TimeVector, g_eval, g_scalar
from .triples import SpectralSolitonData, Triple

__all__ = [
    "g_eval",
    "tau",
    "tau_hat",
    "miwa_shift_tau",
    "double_miwa_shift_tau",
    "HirotaSample",
    "hirota_residual",
    "draw_hirota_point",
    "h1",
    "h2",
    "h_poly",
    "h_poly_terms",
    "h_poly_grid",
    "h_closed_form_2x2",
    "kdv_factorization_check",
    "soliton_sum_tau",
    "u_value",
    "u_field",
    "KPResidual",
    "kp_residual",
    "rational_polynomial",
]

HIROTA_TIME_SUPPORT = (1, 2, 3, 5)
SINGULAR_TAU_TOL = 1e-8


def _exp_factors(M: Triple, t: TimeVector):
    """``(X e^{g(Z)}, e^{g(Y)})``."""
    return M.X @ expm(g_eval(M.Z, t)), expm(g_eval(M.Y, t))


def _shifted_det(xez, ey, Y, Z, shifts):
    ident = np.eye(Y.shape[0], dtype=np.complex128)
    a_part, b_part = xez, ey
    for a in shifts:
        a_part = a_part @ (ident - Z / a)
        b_part = b_part @ (ident - Y / a)
    return det(a_part + b_part)


def tau(M: Triple, t: TimeVector):
    xez, ey = _exp_factors(M, t)
    return det(xez + ey)


def tau_hat(M: Triple, t: TimeVector):
    """Gauge-equivalent ``det(X e^{g(Z)} e^{-g(Y)} + I)``."""
    xez = M.X @ expm(g_eval(M.Z, t))
    return det(xez @ expm(-g_eval(M.Y, t)) + np.eye(M.n))


def _check_nonzero(*points):
    for p in points:
        if p == 0:
            raise PreconditionError("Miwa shift parameter must be non-zero")


def miwa_shift_tau(M: Triple, t: TimeVector, a):
    """``tau(t - [1/a]) = det(X e^{g(Z)} (I - Z/a) + e^{g(Y)} (I - Y/a))``."""
    _check_nonzero(a)
    xez, ey = _exp_factors(M, t)
    return _shifted_det(xez, ey, M.Y, M.Z, (complex(a),))


def double_miwa_shift_tau(M: Triple, t: TimeVector, a, b):
    """``tau(t - [1/a] - [1/b])``, symmetric in ``a`` and ``b``."""
    _check_nonzero(a, b)
    xez, ey = _exp_factors(M, t)
    return _shifted_det(xez, ey, M.Y, M.Z, (complex(a), complex(b)))


@dataclass(frozen=True)
class HirotaSample:
    a: complex
    b: complex
    c: complex
    t: TimeVector
    residual: complex
    scale: float

    @property
    def relative(self):
        return abs(self.residual) / self.scale if self.scale > 0 else float("nan")


def hirota_residual(M: Triple, t: TimeVector, a, b, c):
    """Three-term Miwa-form Hirota sum; ``scale`` is the largest product magnitude."""
    a, b, c = complex(a), complex(b), complex(c)
    _check_nonzero(a, b, c)
    xez, ey = _exp_factors(M, t)

    def d(*s):
        return _shifted_det(xez, ey, M.Y, M.Z, s)

    terms = (
        (b - c) * d(a) * d(b, c),
        -(a - c) * d(b) * d(a, c),
        (a - b) * d(c) * d(a, b),
    )
    return HirotaSample(a, b, c, t, sum(terms), max(abs(x) for x in terms))


def draw_hirota_point(rng, support=HIROTA_TIME_SUPPORT, rmin=0.5, rmax=4.0, min_sep=0.1):
    """Draw ``(a, b, c, t)``: ``|a|, |b|, |c|`` in ``[rmin, rmax]``, pairwise
    separated by ``min_sep``; ``t`` supported on ``support`` inside the unit disc."""
    while True:
        pts = rng.uniform(rmin, rmax, 3) * np.exp(2j * np.pi * rng.uniform(0, 1, 3))
        if min(abs(pts[0] - pts[1]), abs(pts[0] - pts[2]), abs(pts[1] - pts[2])) >= min_sep:
            break
    vals = np.sqrt(rng.uniform(0, 1, len(support))) * np.exp(2j * np.pi * rng.uniform(0, 1, len(support)))
    t = TimeVector(dict(zip(support, vals)))
    return complex(pts[0]), complex(pts[1]), complex(pts[2]), t


def h1(Xhat, Y, Z, a):
    """``det(Xhat (aI - Z) + (aI - Y))``."""
    xh, y, z = as_matrix(Xhat), as_matrix(Y), as_matrix(Z)
    ai = complex(a) * np.eye(y.shape[0])
    return det(xh @ (ai - z) + (ai - y))


def h2(Xhat, Y, Z, a, b):
    """``(a - b) det(Xhat (aI - Z)(bI - Z) + (aI - Y)(bI - Y))``."""
    xh, y, z = as_matrix(Xhat), as_matrix(Y), as_matrix(Z)
    a, b = complex(a), complex(b)
    ident = np.eye(y.shape[0])
    return (a - b) * det(xh @ (a * ident - z) @ (b * ident - z) + (a * ident - y) @ (b * ident - y))


def h_poly_terms(Xhat, Y, Z, a, b, c):
    """The three products of ``H(a, b, c)`` (with their signs)."""
    return (
        h1(Xhat, Y, Z, a) * h2(Xhat, Y, Z, b, c),
        -h1(Xhat, Y, Z, b) * h2(Xhat, Y, Z, a, c),
        h1(Xhat, Y, Z, c) * h2(Xhat, Y, Z, a, b),
    )


def h_poly(Xhat, Y, Z, a, b, c):
    """``H1(a) H2(b,c) - H1(b) H2(a,c) + H1(c) H2(a,b)``."""
    return sum(h_poly_terms(Xhat, Y, Z, a, b, c))


def h_closed_form_2x2(Xhat, Y, Z, a, b, c, sign=-1):
    """``sign * (a-b)(b-c)(c-a) det[(Xhat Z - Y Xhat)(Y - Z)]`` for 2x2 input.

    With ``sign=-1`` this equals ``H(a, b, c)`` identically; ``sign=+1`` is the
    expression with the opposite orientation of the Vandermonde factor.
    """
    xh, y, z = as_matrix(Xhat), as_matrix(Y), as_matrix(Z)
    if xh.shape != (2, 2):
        raise ValueError("closed form holds for 2x2 matrices only")
    a, b, c = complex(a), complex(b), complex(c)
    return sign * (a - b) * (b - c) * (c - a) * det((xh @ z - y @ xh) @ (y - z))


def h_poly_grid(Xhat, Y, Z, A, B, C):
    """``H(a, b, c)`` and its largest term magnitude on the grid ``A x B x C``.

    Returns two arrays of shape ``(len(A), len(B), len(C))``.
    """
    pts = sorted({complex(p) for p in (*A, *B, *C)}, key=lambda z: (z.real, z.imag))
    one = {p: h1(Xhat, Y, Z, p) for p in pts}
    two = {}

    def h2c(p, q):
        if (p, q) not in two:
            two[(p, q)] = h2(Xhat, Y, Z, p, q)
        return two[(p, q)]

    shape = (len(A), len(B), len(C))
    value = np.empty(shape, dtype=np.complex128)
    scale = np.empty(shape)
    for (i, a), (j, b), (k, c) in itertools.product(enumerate(A), enumerate(B), enumerate(C)):
        a, b, c = complex(a), complex(b), complex(c)
        terms = (one[a] * h2c(b, c), -one[b] * h2c(a, c), one[c] * h2c(a, b))
        value[i, j, k] = sum(terms)
        scale[i, j, k] = max(abs(x) for x in terms)
    return value, scale


def kdv_factorization_check(M: Triple, N, t: TimeVector):
    """Relative deviation ``|tau(t) - tau(t|t_j=0) det(e^{t_j Z^j})| / |tau(t)|``.

    ``t`` must be supported on ``{1, j}`` with ``j`` a multiple of ``N``.
    """
    extra = [i for i in t.support if i != 1]
    if len(extra) > 1 or (extra and extra[0] % N):
        raise PreconditionError(f"time support {t.support} must lie in {{1, j}} with N | j")
    full = tau(M, t)
    if not extra:
        return 0.0
    j = extra[0]
    tj = t[j]
    factored = tau(M, t.replace(**{f"t{j}": 0})) * det(expm(tj * np.linalg.matrix_power(M.Z, j)))
    return abs(full - factored) / abs(full)


def soliton_sum_tau(data: SpectralSolitonData, t: TimeVector):
    """n-soliton tau as a sum over subsets with Cauchy-determinant interactions."""
    if data.n > 20:
        raise PreconditionError("subset enumeration limited to n <= 20")
    lam, mu = data.lam, data.mu
    g_l = np.array([g_scalar(z, t) for z in lam])
    g_m = np.array([g_scalar(z, t) for z in mu])
    weights = data.c() * np.exp(g_l - g_m)
    with np.errstate(divide="ignore", invalid="ignore"):
        pair = ((lam[:, None] - lam[None, :]) * (mu[:, None] - mu[None, :])
                / ((lam[:, None] - mu[None, :]) * (mu[:, None] - lam[None, :])))
    pair[~np.isfinite(pair)] = 0.0  # diagonal, never read
    return _core.subset_sum(weights, pair)


# KP field u = factor * d^2/dx^2 log tau(x, y, t, 0, ...)

def _hadamard_check(a):
    """Raise SingularTau when ``|det a|`` is tiny against the Hadamard bound."""
    d = det(a)
    bound = np.prod(np.linalg.norm(a, axis=1))
    if bound == 0 or abs(d) < SINGULAR_TAU_TOL * bound:
        raise SingularTau(f"tau nearly vanishes (|tau| = {abs(d):.3g}, bound {bound:.3g})")
    return d


def _tau_matrix(M, x, y, s):
    xez, ey = _exp_factors(M, TimeVector.xyt(x, y, s))
    return xez + ey


def _u_fd(M, x, y, s, h=None):
    h = 1e-3 * max(1.0, abs(x)) if h is None else h

    def second(step):
        vals = {}
        for k in (-2, -1, 0, 1, 2):
            vals[k] = _hadamard_check(_tau_matrix(M, x + k * step, y, s))
        logs = {k: np.log(vals[k] / vals[0]) for k in vals}
        return (-logs[-2] + 16 * logs[-1] - 30 * logs[0] + 16 * logs[1] - logs[2]) / (12 * step**2)

    # one Richardson level on the 4th-order stencil
    return (16 * second(h / 2) - second(h)) / 15


def _u_jacobi(M, x, y, s):
    t = TimeVector.xyt(x, y, s)
    ez = expm(g_eval(M.Z, t))
    ey = expm(g_eval(M.Y, t))
    a0 = M.X @ ez + ey
    _hadamard_check(a0)
    a1 = M.X @ ez @ M.Z + ey @ M.Y
    a2 = M.X @ ez @ M.Z @ M.Z + ey @ M.Y @ M.Y
    b = np.linalg.solve(a0, a1)
    c = np.linalg.solve(a0, a2)
    return np.trace(c) - np.trace(b @ b)


def u_value(M: Triple, x, y=0.0, s=0.0, factor=2.0, method="fd"):
    """``factor * d^2/dx^2 log tau`` at one point.

    ``method="fd"`` differentiates log tau with 4th-order central differences
    (step ``1e-3 * max(1, |x|)``, one Richardson level); ``method="jacobi"``
    uses the exact trace formula for the log-determinant.
    """
    if method == "fd":
        return factor * _u_fd(M, float(x), y, s)
    if method == "jacobi":
        return factor * _u_jacobi(M, float(x), y, s)
    raise ValueError(f"unknown method {method!r}")


def u_field(M: Triple, x, y=0.0, s=0.0, factor=2.0, method="fd"):
    """``u`` on the broadcast grid of ``x``, ``y``, ``s``; returns a complex array."""
    xs, ys, ss = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float), np.asarray(s, float))
    out = np.empty(xs.shape, dtype=np.complex128)
    for idx in np.ndindex(xs.shape):
        out[idx] = u_value(M, xs[idx], ys[idx], ss[idx], factor, method)
    return out


@dataclass(frozen=True)
class KPResidual:
    residual: complex
    scale: float
    terms: dict

    @property
    def relative(self):
        return abs(self.residual) / self.scale if self.scale > 0 else abs(self.residual)


_D1 = np.array([1, -8, 0, 8, -1]) / 12.0
_D2 = np.array([-1, 16, -30, 16, -1]) / 12.0
_D4 = np.array([-1, 12, -39, 56, -39, 12, -1]) / 6.0


def kp_residual(M: Triple, x, y=0.0, s=0.0, factor=2.0, step=0.02, inner="jacobi"):
    """Residual of ``(3/4) u_yy = (u_t - (6 u u_x + u_xxx)/4)_x`` at one point.

    Derivatives of ``u`` use 4th-order central differences with step
    ``step * max(1, |x|)``.  ``inner`` selects how ``u`` itself is evaluated
    (see :func:`u_value`); the nested ``"fd"`` route loses roughly
    ``1e-10 / step**4`` to cancellation.
    """
    h = step * max(1.0, abs(x))
    cache = {}

    def u(i, j, k):
        key = (i, j, k)
        if key not in cache:
            cache[key] = u_value(M, x + i * h, y + j * h, s + k * h, factor, inner)
        return cache[key]

    r2 = range(-2, 3)
    u0 = u(0, 0, 0)
    u_x = sum(_D1[i + 2] * u(i, 0, 0) for i in r2) / h
    u_xx = sum(_D2[i + 2] * u(i, 0, 0) for i in r2) / h**2
    u_xxxx = sum(_D4[i + 3] * u(i, 0, 0) for i in range(-3, 4)) / h**4
    u_yy = sum(_D2[j + 2] * u(0, j, 0) for j in r2) / h**2
    u_xt = sum(_D1[i + 2] * _D1[k + 2] * u(i, 0, k) for i in r2 for k in r2) / h**2
    terms = {
        "3/4 u_yy": 0.75 * u_yy,
        "u_xt": u_xt,
        "3/2 u_x^2": 1.5 * u_x**2,
        "3/2 u u_xx": 1.5 * u0 * u_xx,
        "1/4 u_xxxx": 0.25 * u_xxxx,
    }
    residual = (terms["3/4 u_yy"] - terms["u_xt"] + terms["3/2 u_x^2"]
                + terms["3/2 u u_xx"] + terms["1/4 u_xxxx"])
    return KPResidual(residual, max(abs(v) for v in terms.values()), terms)


def rational_polynomial(lam, x, y=0.0, s=0.0, linear_y=False):
    """Closed form of ``tau_hat`` for :func:`rational_example` at ``(t1, t2, t3) = (x, y, s)``.

    ``linear_y=True`` replaces the ``2 lam^2 y^2`` term by ``2 lam^2 y``,
    a variant that circulates for this example; it is not a tau-function
    of the triple.
    """
    lam = complex(lam)
    yy = y if linear_y else y * y
    return (1 + (3 * lam**2 - 3 * lam) * s + 4.5 * lam**4 * s * s + x * x / 2
            + (6 * lam**3 * s + 2 * lam - 1) * y + 2 * lam**2 * yy
            + (1 + 3 * lam**2 * s + 2 * lam * y) * x)
