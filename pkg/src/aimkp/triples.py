"""Almost intertwining triples ``(X, Y, Z)`` and the operations that act on them.

The intertwining rank ``kappa = rank(XZ - YX)`` is computed once when a
:class:`Triple` is built and cached; it decides whether the determinant
formula yields a KP tau-function (``kappa <= 1``).
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_sylvester

from . import linalg
from .errors import DimensionMismatch, PreconditionError
from .linalg import DEFAULT_RANK_TOL, as_matrix, as_vector, expm
from .times import TimeVector, g_eval

__all__ = [
    "Triple",
    "SpectralSolitonData",
    "make_rng",
    "kappa",
    "gl_action",
    "lambda_omega_action",
    "soliton_triple",
    "is_nkdv",
    "rational_example",
    "flow",
    "inverse_symmetry",
    "yx_symmetry",
    "random_soliton_data",
    "random_kappa_one",
    "random_full_rank",
    "random_kdv_triple",
    "linear_reduction_triple",
]


def make_rng(seed, stream=0):
    """Counter-based Philox-4x64 generator keyed by ``SeedSequence([seed, stream])``.

    Every random draw in the package goes through this function; distinct
    ``stream`` values give independent generators for the same seed.
    """
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(stream)])))


def _freeze(a):
    a = np.array(a, dtype=np.complex128, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Triple:
    """Immutable ``(X, Y, Z)`` of equal-size complex square matrices.

    ``kappa`` is the numerical rank of ``XZ - YX`` at ``rank_tol``.
    """

    X: np.ndarray
    Y: np.ndarray
    Z: np.ndarray
    rank_tol: float = DEFAULT_RANK_TOL
    kappa: int = field(init=False)

    def __post_init__(self):
        x = as_matrix(self.X, "X")
        y = as_matrix(self.Y, "Y")
        z = as_matrix(self.Z, "Z")
        if not (x.shape == y.shape == z.shape):
            raise DimensionMismatch(f"X, Y, Z shapes differ: {x.shape}, {y.shape}, {z.shape}")
        object.__setattr__(self, "X", _freeze(x))
        object.__setattr__(self, "Y", _freeze(y))
        object.__setattr__(self, "Z", _freeze(z))
        object.__setattr__(self, "kappa", self.recompute_kappa(self.rank_tol))

    @property
    def n(self):
        return self.X.shape[0]

    def defect(self):
        """The intertwining defect ``XZ - YX``."""
        return self.X @ self.Z - self.Y @ self.X

    def recompute_kappa(self, tol):
        return kappa(self.X, self.Y, self.Z, tol)

    def allclose(self, other, rtol=1e-10, atol=1e-12):
        return all(np.allclose(a, b, rtol=rtol, atol=atol)
                   for a, b in ((self.X, other.X), (self.Y, other.Y), (self.Z, other.Z)))

    def __repr__(self):
        return f"Triple(n={self.n}, kappa={self.kappa})"


@dataclass(frozen=True, eq=False)
class SpectralSolitonData:
    """Quadruples ``(alpha_i, beta_i, lambda_i, mu_i)`` defining an n-soliton."""

    alpha: np.ndarray
    beta: np.ndarray
    lam: np.ndarray
    mu: np.ndarray

    def __post_init__(self):
        arrays = [as_vector(getattr(self, k), k) for k in ("alpha", "beta", "lam", "mu")]
        if len({a.size for a in arrays}) != 1:
            raise DimensionMismatch("alpha, beta, lambda, mu must have equal length")
        alpha, beta, lam, mu = arrays
        if np.any(beta == 0):
            raise PreconditionError("beta_i must be non-zero")
        if np.any(lam[None, :] == mu[:, None]):
            raise PreconditionError("lambda_j coincides with some mu_i (pole in X)")
        if np.unique(lam).size != lam.size or np.unique(mu).size != mu.size:
            raise PreconditionError("lambda_i and mu_i must be pairwise distinct")
        for k, a in zip(("alpha", "beta", "lam", "mu"), arrays):
            object.__setattr__(self, k, _freeze(a))

    @property
    def n(self):
        return self.alpha.size

    def c(self):
        """Soliton amplitudes ``c_i = alpha_i / (beta_i (lambda_i - mu_i))``."""
        return self.alpha / (self.beta * (self.lam - self.mu))


def kappa(X, Y, Z, tol=DEFAULT_RANK_TOL):
    """Numerical rank of ``XZ - YX``; singular values at rounding level of ``XZ`` and ``YX`` do not count."""
    x, y, z = as_matrix(X, "X"), as_matrix(Y, "Y"), as_matrix(Z, "Z")
    if not (x.shape == y.shape == z.shape):
        raise DimensionMismatch(f"X, Y, Z shapes differ: {x.shape}, {y.shape}, {z.shape}")
    floor = linalg.roundoff_floor(x, z) + linalg.roundoff_floor(y, x)
    return linalg.numerical_rank(x @ z - y @ x, tol, floor)


def gl_action(M: Triple, G, H):
    """``(G X H^-1, G Y G^-1, H Z H^-1)``."""
    g = linalg.check_invertible(G, "G")
    h = linalg.check_invertible(H, "H")
    g_inv = np.linalg.inv(g)
    h_inv = np.linalg.inv(h)
    return Triple(g @ M.X @ h_inv, g @ M.Y @ g_inv, h @ M.Z @ h_inv, M.rank_tol)


def lambda_omega_action(M: Triple, Lam, Om, tol=1e-9):
    """``(Lam X Om, Y, Z)`` for ``[Lam, Y] = 0`` and ``[Om, Z] = 0``."""
    lam = as_matrix(Lam, "Lambda")
    om = as_matrix(Om, "Omega")
    for name, a, b in (("[Lambda, Y]", lam, M.Y), ("[Omega, Z]", om, M.Z)):
        scale = np.linalg.norm(a) * np.linalg.norm(b)
        if np.linalg.norm(linalg.commutator(a, b)) > tol * max(scale, 1.0):
            raise PreconditionError(f"{name} does not vanish")
    return Triple(lam @ M.X @ om, M.Y, M.Z, M.rank_tol)


def soliton_triple(data: SpectralSolitonData):
    """``X_ij = alpha_i / (beta_j (lambda_j - mu_i))``, ``Y = diag(mu)``, ``Z = diag(lambda)``."""
    x = data.alpha[:, None] / (data.beta[None, :] * (data.lam[None, :] - data.mu[:, None]))
    return Triple(x, np.diag(data.mu), np.diag(data.lam))


def is_nkdv(M: Triple, N, tol=1e-9):
    """Whether ``Y^N = Z^N`` to relative tolerance ``tol``."""
    if N < 1:
        raise ValueError("N must be >= 1")
    yn = np.linalg.matrix_power(M.Y, N)
    zn = np.linalg.matrix_power(M.Z, N)
    return bool(np.linalg.norm(yn - zn) <= tol * (np.linalg.norm(yn) + np.linalg.norm(zn) + 1.0))


def rational_example(lam):
    """The 3x3 triple whose tau-function is, up to gauge, a polynomial in x, y, t."""
    lam = complex(lam)
    x = np.array([[1, 1, 0], [1, 0, 0], [1, 0, 0]], dtype=np.complex128)
    y = np.array([[lam, 1, 0], [0, lam, 1], [0, 0, lam]], dtype=np.complex128)
    return Triple(x, y, y.T.copy())


def flow(M0: Triple, t: TimeVector):
    """KP flow ``X_t = exp(-g(Y)) X_0 exp(g(Z))``; ``Y``, ``Z`` fixed, kappa preserved."""
    x_t = expm(-g_eval(M0.Y, t)) @ M0.X @ expm(g_eval(M0.Z, t))
    return Triple(x_t, M0.Y, M0.Z, M0.rank_tol)


def inverse_symmetry(M: Triple):
    """``(X^-1, Z, Y)``; an involution describing the same KP solution."""
    return Triple(linalg.inv(M.X, "X"), M.Z, M.Y, M.rank_tol)


def yx_symmetry(M: Triple):
    """``(Y, X Z Y^-1, X)``, whose defect is ``-(XZ - YX)``; needs ``Y`` invertible.

    The ordering ``(Y, X, X Z Y^-1)`` does not preserve kappa in general.
    """
    y_inv = linalg.inv(M.Y, "Y")
    return Triple(M.Y, M.X @ M.Z @ y_inv, M.X, M.rank_tol)


# Seeded generators (fixtures, CLI ``gen``, property tests).

def _complex_normal(rng, size, scale=1.0):
    return scale * (rng.standard_normal(size) + 1j * rng.standard_normal(size)) / np.sqrt(2.0)


def _well_separated(points, min_sep):
    d = np.abs(points[:, None] - points[None, :])
    return np.all(d[~np.eye(points.size, dtype=bool)] >= min_sep) if points.size > 1 else True


def random_soliton_data(rng, n, real=False, min_sep=0.25, radius=1.0):
    """Spectral data with pairwise separated lambda, mu inside a disc of ``radius``."""
    while True:
        if real:
            pts = rng.uniform(-radius, radius, size=2 * n).astype(np.complex128)
        else:
            pts = radius * np.sqrt(rng.uniform(0, 1, 2 * n)) * np.exp(2j * np.pi * rng.uniform(0, 1, 2 * n))
        if _well_separated(pts, min_sep):
            break
    if real:
        alpha = rng.uniform(0.5, 1.5, n).astype(np.complex128)
        beta = rng.uniform(0.5, 1.5, n).astype(np.complex128)
    else:
        alpha = _complex_normal(rng, n) + 0.5
        beta = np.exp(2j * np.pi * rng.uniform(0, 1, n)) * rng.uniform(0.5, 1.5, n)
    return SpectralSolitonData(alpha, beta, pts[:n], pts[n:])


def _random_well_conditioned(rng, n, spread=0.4):
    return np.eye(n) + spread * _complex_normal(rng, (n, n)) / np.sqrt(n)


def random_kappa_one(rng, n, method="sylvester"):
    """Random triple with kappa = 1.

    ``method="soliton"`` conjugates a soliton triple by a random
    well-conditioned matrix; ``method="sylvester"`` draws ``Y, Z, v, w`` and
    solves ``XZ - YX = v w^T`` for ``X``.  Spectra of ``Y`` and ``Z`` lie in
    the closed unit disc.
    """
    while True:
        if method == "soliton":
            m = soliton_triple(random_soliton_data(rng, n))
            if n > 1:
                g = _random_well_conditioned(rng, n)
                m = gl_action(m, g, g)
        elif method == "sylvester":
            y = _complex_normal(rng, (n, n), 1.0 / np.sqrt(n))
            z = _complex_normal(rng, (n, n), 1.0 / np.sqrt(n))
            # spectra inside the unit disc, like the soliton generator, so that
            # exp(t_k W^k) stays moderate for |t_k| <= 1
            ey, ez = np.linalg.eigvals(y), np.linalg.eigvals(z)
            s = max(1.0, np.max(np.abs(ey)), np.max(np.abs(ez)))
            y, z, ey, ez = y / s, z / s, ey / s, ez / s
            if np.min(np.abs(ey[:, None] - ez[None, :])) < 0.2:
                continue
            v = _complex_normal(rng, n)
            w = _complex_normal(rng, n)
            x = solve_sylvester(-y, z, np.outer(v, w))
            m = Triple(x, y, z)
        else:
            raise ValueError(f"unknown method {method!r}")
        if m.kappa == 1 and np.linalg.cond(m.X) < 1e6:
            return m


def random_full_rank(rng, n, scale=None):
    """Independently random ``X, Y, Z`` (kappa = n with probability one)."""
    scale = 1.0 / np.sqrt(n) if scale is None else scale
    while True:
        m = Triple(_complex_normal(rng, (n, n)), _complex_normal(rng, (n, n), scale),
                   _complex_normal(rng, (n, n), scale))
        if m.kappa == n:
            return m


def random_kdv_triple(rng, n, conjugate=True):
    """Triple with ``Y = -Z`` and ``rank(XZ + ZX) = 1`` (a KdV point, N = 2)."""
    while True:
        lam = rng.uniform(0.3, 1.5, n) * rng.choice([-1.0, 1.0], n) + 0.3j * rng.standard_normal(n)
        sums = lam[:, None] + lam[None, :]
        if np.min(np.abs(sums)) < 0.2 or not _well_separated(lam, 0.2):
            continue
        data = SpectralSolitonData(rng.uniform(0.5, 1.5, n), rng.uniform(0.5, 1.5, n), lam, -lam)
        m = soliton_triple(data)
        if conjugate and n > 1:
            g = _random_well_conditioned(rng, n)
            m = gl_action(m, g, g)
        if m.kappa == 1:
            return m


def linear_reduction_triple(mu, lam_coef, gamma, alpha=None, beta=None):
    """Soliton-type triple with ``Z = lam_coef * Y + gamma * I`` and ``Y = diag(mu)``."""
    mu = as_vector(mu, "mu")
    n = mu.size
    alpha = np.ones(n) if alpha is None else alpha
    beta = np.ones(n) if beta is None else beta
    data = SpectralSolitonData(alpha, beta, lam_coef * mu + gamma, mu)
    return soliton_triple(data)
