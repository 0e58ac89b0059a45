"""Stationary Baker-Akhiezer function of a triple and the wave polynomial ``K``.

``psi(x, z) = K(x, z) e^{xz} / z^n`` with
``K = det(X (zI-Z) e^{xZ} + (zI-Y) e^{xY}) / det(X e^{xZ} + e^{xY})``; ``K`` is
stored as ``psi_bar`` on :class:`BAEvaluation`.
"""

from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError, SingularTau
from .linalg import det, expm
from .tau import SINGULAR_TAU_TOL, miwa_shift_tau, tau
from .times import TimeVector, g_eval
from .triples import SpectralSolitonData, Triple, soliton_triple


@dataclass(frozen=True)
class BAEvaluation:
    x: float
    z: complex
    psi: complex
    psi_bar: complex  # z^n e^{-xz} psi


class _Pencil:
    """Numerator/denominator matrices of ``K`` at fixed times, reused over many ``z``."""

    def __init__(self, M: Triple, t: TimeVector):
        ez = expm(g_eval(M.Z, t))
        ey = expm(g_eval(M.Y, t))
        self.n = M.n
        self.lead = M.X @ ez + ey
        self.const = M.X @ M.Z @ ez + M.Y @ ey
        bound = np.prod(np.linalg.norm(self.lead, axis=1))
        self.den = det(self.lead)
        if bound == 0 or abs(self.den) < SINGULAR_TAU_TOL * bound:
            raise SingularTau(f"tau vanishes at t = {t.as_dict()}")

    def numerator(self, z):
        return det(complex(z) * self.lead - self.const)

    def __call__(self, z):
        return self.numerator(z) / self.den


def psi(M: Triple, x, z):
    """Evaluate the Baker-Akhiezer function at real ``x`` and ``z != 0``."""
    z = complex(z)
    if z == 0:
        raise PreconditionError("psi is singular at z = 0")
    k = _Pencil(M, TimeVector({1: x}))(z)
    return BAEvaluation(float(x), z, k * np.exp(x * z) / z**M.n, k)


def psi_bar(M: Triple, x, z):
    """``z^n e^{-xz} psi``, evaluated from the numerator so ``z = 0`` is allowed."""
    return _Pencil(M, TimeVector({1: x}))(z)


def psi_from_tau(M: Triple, x, z):
    """``psi`` as the quotient ``tau(t - [1/z]) / tau(t) * e^{xz}`` at ``t = (x, 0, ...)``."""
    t = TimeVector({1: x})
    return miwa_shift_tau(M, t, z) / tau(M, t) * np.exp(x * complex(z))


def default_nodes(M: Triple, count, phase=0.0):
    """``count`` points on a circle of radius ``1 + max spectral radius(Y, Z)``."""
    r = 1.0 + max(np.max(np.abs(np.linalg.eigvals(M.Y))), np.max(np.abs(np.linalg.eigvals(M.Z))))
    return r * np.exp(2j * np.pi * (np.arange(count) + phase) / count)


def check_polynomiality(M: Triple, x, z_nodes=None, holdout=None):
    """Max relative deviation of ``psi_bar`` from its degree-n interpolant.

    The interpolant is fitted at ``n + 1`` nodes and checked at the holdout
    nodes (default: ``n + 4`` points of a rotated circle).
    """
    n = M.n
    k = _Pencil(M, TimeVector({1: x}))
    nodes = default_nodes(M, n + 1) if z_nodes is None else np.asarray(z_nodes, dtype=np.complex128)
    if holdout is None:
        holdout = default_nodes(M, n + 4, phase=0.37)
    if nodes.size < n + 1 or len(holdout) < 3:
        raise PreconditionError("need n + 1 interpolation nodes and at least 3 holdout nodes")
    nodes = nodes[: n + 1]
    vals = np.array([k(z) for z in nodes])
    coeffs = np.linalg.solve(np.vander(nodes, n + 1, increasing=True), vals)
    held = np.array([k(z) for z in holdout])
    fit = np.polynomial.polynomial.polyval(np.asarray(holdout), coeffs)
    return float(np.max(np.abs(fit - held)) / np.max(np.abs(held)))


def condition_coefficients(data: SpectralSolitonData):
    """Pairs ``(a_i, b_i)`` with ``a_i psibar(lambda_i) + b_i psibar(mu_i) = 0``.

    ``psibar`` here carries the ``e^{xz}`` factor.  For the soliton triple the
    pair is ``(alpha_i, beta_i * rho_i)`` with
    ``rho_i = prod_k (lambda_i - mu_k) / prod_{k != i} (mu_i - mu_k)``.
    """
    lam, mu = data.lam, data.mu
    rho = np.empty(data.n, dtype=np.complex128)
    for i in range(data.n):
        others = np.delete(mu, i)
        rho[i] = np.prod(lam[i] - mu) / np.prod(mu[i] - others)
    return data.alpha.copy(), data.beta * rho


def soliton_conditions_residual(data: SpectralSolitonData, x, coefficients="derived", M=None):
    """Normalised residuals of the n linear conditions at ``(lambda_i, mu_i)``.

    ``coefficients="derived"`` uses :func:`condition_coefficients`;
    ``"plain"`` uses ``(alpha_i, beta_i)`` unchanged, which holds only
    when every ``rho_i = 1``.  ``M`` overrides the triple whose
    ``psi_bar`` is tested (default: ``soliton_triple(data)``).
    """
    if coefficients == "derived":
        ca, cb = condition_coefficients(data)
    elif coefficients == "plain":
        ca, cb = data.alpha, data.beta
    else:
        raise ValueError(f"unknown coefficients {coefficients!r}")
    k = _Pencil(soliton_triple(data) if M is None else M, TimeVector({1: x}))
    out = np.empty(data.n, dtype=np.complex128)
    for i in range(data.n):
        p = ca[i] * k(data.lam[i]) * np.exp(x * data.lam[i])
        q = cb[i] * k(data.mu[i]) * np.exp(x * data.mu[i])
        out[i] = (p + q) / (abs(p) + abs(q))
    return out


def k_poly_coeffs(M: Triple, t: TimeVector):
    """Coefficients ``[k_0, ..., k_n]`` (ascending) of ``K(t, z)`` by interpolation."""
    k = _Pencil(M, t)
    nodes = default_nodes(M, M.n + 1)
    vals = np.array([k(z) for z in nodes])
    return np.linalg.solve(np.vander(nodes, M.n + 1, increasing=True), vals)


def k_roots(M: Triple, t: TimeVector):
    coeffs = k_poly_coeffs(M, t)
    return np.sort_complex(np.polynomial.polynomial.polyroots(coeffs))


def spectrum_diagnostic(M: Triple):
    """Eigenvalues of ``Y`` and ``Z`` (the expected supports of the conditions); asserts nothing."""
    return {"Y": np.sort_complex(np.linalg.eigvals(M.Y)), "Z": np.sort_complex(np.linalg.eigvals(M.Z))}
