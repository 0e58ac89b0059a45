"""Eigenvalue dynamics of ``X_t = e^{-tY} X_0 e^{tZ}`` under the first KP flow.

A :class:`FlowState` is the diagonalising frame ``Q = U X_t U^{-1}`` together
with the conjugated ``Y``, ``Z`` and the rank-one factors of
``X_t Z - Y X_t``.  For ``Z = lam * Y + gamma * I`` the logarithms of the
eigenvalues obey a closed second-order system (:func:`rs_rhs`); at
``lam = -1`` this is the Ruijsenaars-Schneider model.
"""

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import linalg
from .errors import DegenerateSpectrum, PreconditionError
from .times import TimeVector
from .triples import Triple, flow

COLLISION_TOL = 1e-6


def rank_one_factors(M: Triple):
    """``(v, w)`` with ``v w^T = XZ - YX``, ``|w| = 1`` and first non-zero ``w`` entry real positive."""
    if M.kappa != 1:
        raise PreconditionError(f"rank-one factorisation needs kappa = 1, got {M.kappa}")
    u, s, vh = np.linalg.svd(M.defect())
    v = s[0] * u[:, 0]
    w = vh[0].copy()
    lead = w[np.flatnonzero(np.abs(w) > 1e-14 * np.max(np.abs(w)))[0]]
    phase = lead / abs(lead)
    return v * phase, w / phase


def sorted_eigvals(a):
    w = np.linalg.eigvals(a)
    return w[np.lexsort((np.arange(w.size), w.imag, w.real))]


def min_separation(Q):
    if Q.size < 2:
        return np.inf
    d = np.abs(Q[:, None] - Q[None, :])
    return float(np.min(d[~np.eye(Q.size, dtype=bool)]))


def _collided(Q):
    return min_separation(Q) < COLLISION_TOL * np.max(np.abs(Q))


def match_order(reference, values):
    """Permutation of ``values`` closest (minimal total displacement) to ``reference``."""
    cost = np.abs(np.asarray(reference)[:, None] - np.asarray(values)[None, :])
    _, cols = linear_sum_assignment(cost)
    return cols


def _nearest_branch(q, q_ref):
    return q + 2j * np.pi * np.round((q_ref - q).imag / (2 * np.pi))


@dataclass(frozen=True, eq=False)
class FlowState:
    t: float
    Q: np.ndarray
    q: np.ndarray
    U: np.ndarray
    Yhat: np.ndarray
    Zhat: np.ndarray
    vhat: np.ndarray
    what: np.ndarray
    X: np.ndarray = field(repr=False)

    @property
    def n(self):
        return self.Q.size

    def linear1_residual(self):
        """Max over ``i, j`` of ``|Q_i Zhat_ij - Q_j Yhat_ij - P_ij|``."""
        lhs = self.Q[:, None] * self.Zhat - self.Q[None, :] * self.Yhat
        return float(np.max(np.abs(lhs - self.P())))

    def P(self):
        """``vhat what^T = U (X Z - Y X) U^{-1}``, entry ``(i, j) = vhat_i what_j``."""
        return np.outer(self.vhat, self.what)

    def Qdot(self):
        """``Qdot_i = vhat_i what_i``."""
        return self.vhat * self.what


def flow_state(M0: Triple, t, order_ref=None, q_ref=None):
    """Diagonalised frame of ``X_t`` for the t1-flow started at ``M0``.

    ``order_ref`` (previous eigenvalues) fixes the labelling by minimal
    displacement; ``q_ref`` selects the branch of ``log Q`` nearest to it.
    """
    if M0.kappa != 1:
        raise PreconditionError(f"eigenvalue flow needs kappa = 1, got {M0.kappa}")
    mt = flow(M0, TimeVector({1: t})) if t != 0 else M0
    Q, V = linalg.eig(mt.X)
    if order_ref is not None:
        perm = match_order(order_ref, Q)
        Q, V = Q[perm], V[:, perm]
    if _collided(Q):
        raise DegenerateSpectrum(f"eigenvalue collision at t = {t}")
    U = np.linalg.inv(V)
    v, w = rank_one_factors(mt)
    q = np.log(Q)
    if q_ref is not None:
        q = _nearest_branch(q, np.asarray(q_ref))
    return FlowState(float(t), Q, q, U, U @ mt.Y @ V, U @ mt.Z @ V, U @ v, V.T @ w, mt.X)


def normalize_gauge(s: FlowState):
    """Rescale ``U`` by ``diag(what)`` so that ``what = (1, ..., 1)``; ``Q`` unchanged."""
    d = s.what
    if np.any(np.abs(d) < 1e-12 * np.max(np.abs(d))):
        raise PreconditionError("what has a zero component")
    dinv = 1.0 / d
    return replace(
        s,
        U=d[:, None] * s.U,
        Yhat=d[:, None] * s.Yhat * dinv[None, :],
        Zhat=d[:, None] * s.Zhat * dinv[None, :],
        vhat=d * s.vhat,
        what=np.ones_like(d),
    )


def qdot(s: FlowState):
    """``qdot_i = (Zhat - Yhat)_ii``."""
    return np.diag(s.Zhat - s.Yhat).copy()


def m_offdiag(s: FlowState):
    """``M_ij = P_ij / (Q_i - Q_j)`` off the diagonal, 0 on it (``P = vhat what^T``)."""
    if _collided(s.Q):
        raise DegenerateSpectrum("eigenvalue collision")
    diff = s.Q[:, None] - s.Q[None, :]
    np.fill_diagonal(diff, 1.0)
    m = s.P() / diff
    np.fill_diagonal(m, 0.0)
    return m


def acceleration_forms(s: FlowState):
    """``qddot`` as ``([M, Zhat - Yhat])_ii`` and as the explicit pairwise sum."""
    m = m_offdiag(s)
    d = s.Zhat - s.Yhat
    commutator_form = np.diag(m @ d - d @ m).copy()
    Q, P, Zh = s.Q, s.P(), s.Zhat
    Qd = np.diag(P)
    n = s.n
    explicit = np.zeros(n, dtype=np.complex128)
    for i in range(n):
        for k in range(n):
            if k == i:
                continue
            num = (Qd[i] * Qd[k] * (Q[i] + Q[k])
                   - (Q[i] - Q[k]) * (Q[i] * P[k, i] * Zh[i, k] - Q[k] * P[i, k] * Zh[k, i]))
            explicit[i] += num / (Q[i] * Q[k] * (Q[i] - Q[k]))
    return commutator_form, explicit


def general_acceleration(s: FlowState, agree_tol=1e-8):
    """``qddot`` from the general equations of motion (explicit-sum value).

    Both internal forms are evaluated; a relative disagreement above
    ``agree_tol`` raises ``ArithmeticError``.
    """
    comm, explicit = acceleration_forms(s)
    scale = max(1.0, float(np.max(np.abs(explicit))))
    if np.max(np.abs(comm - explicit)) > agree_tol * scale:
        raise ArithmeticError("commutator and explicit acceleration forms disagree")
    return explicit


def rs_rhs(Q, Qdot, lam):
    """``qddot_i = (lam-1)^2 Qdot_i sum_k Qdot_k (Q_i+Q_k) / ((Q_i-Q_k)(lam Q_i-Q_k)(lam Q_k-Q_i))``."""
    Q = np.asarray(Q, dtype=np.complex128)
    Qdot = np.asarray(Qdot, dtype=np.complex128)
    lam = complex(lam)
    n = Q.size
    if n < 2 or lam == 1:
        return np.zeros(n, dtype=np.complex128)
    qi, qk = Q[:, None], Q[None, :]
    den = (qi - qk) * (lam * qi - qk) * (lam * qk - qi)
    off = ~np.eye(n, dtype=bool)
    scale = np.max(np.abs(Q)) ** 3
    if np.min(np.abs(den[off])) < 1e-14 * scale:
        raise DegenerateSpectrum("rs_rhs denominator vanishes")
    den = np.where(off, den, 1.0)
    terms = np.where(off, Qdot[None, :] * (qi + qk) / den, 0.0)
    return (lam - 1) ** 2 * Qdot * terms.sum(axis=1)


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    Q: np.ndarray  # shape (len(times), n)
    source: str  # "direct" or "ode"
    flags: np.ndarray = None  # per-time collision flags
    truncated: bool = False

    def __post_init__(self):
        if self.flags is None:
            object.__setattr__(self, "flags", np.zeros(len(self.times), dtype=bool))

    @property
    def flagged(self):
        return bool(self.truncated or np.any(self.flags))


def integrate_rs(q0, qdot0, lam, t_end, step):
    """Classical RK4 for the closed eigenvalue system, state ``(q, qdot)``.

    Stops early (``truncated=True``) when eigenvalues collide or a
    denominator of :func:`rs_rhs` vanishes.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    q = np.array(q0, dtype=np.complex128)
    p = np.array(qdot0, dtype=np.complex128)
    n_steps = int(round(t_end / step))
    h = t_end / n_steps if n_steps else 0.0

    def rhs(q, p):
        Q = np.exp(q)
        return p, rs_rhs(Q, p * Q, lam)

    times = [0.0]
    Qs = [np.exp(q)]
    truncated = False
    for k in range(n_steps):
        try:
            k1q, k1p = rhs(q, p)
            k2q, k2p = rhs(q + 0.5 * h * k1q, p + 0.5 * h * k1p)
            k3q, k3p = rhs(q + 0.5 * h * k2q, p + 0.5 * h * k2p)
            k4q, k4p = rhs(q + h * k3q, p + h * k3p)
        except DegenerateSpectrum:
            truncated = True
            break
        q = q + h / 6 * (k1q + 2 * k2q + 2 * k3q + k4q)
        p = p + h / 6 * (k1p + 2 * k2p + 2 * k3p + k4p)
        Q = np.exp(q)
        times.append((k + 1) * h)
        Qs.append(Q)
        if Q.size > 1 and _collided(Q):
            truncated = True
            break
    return Trajectory(np.array(times), np.array(Qs), "ode", truncated=truncated)


def track_eigenvalues(M0: Triple, t_grid):
    """Eigenvalues of ``X_t`` on ``t_grid``, labelled continuously by minimal displacement."""
    if M0.kappa != 1:
        raise PreconditionError(f"eigenvalue flow needs kappa = 1, got {M0.kappa}")
    t_grid = np.asarray(t_grid, dtype=float)
    series = []
    flags = np.zeros(t_grid.size, dtype=bool)
    prev = None
    for idx, t in enumerate(t_grid):
        cur = sorted_eigvals(flow(M0, TimeVector({1: t})).X)
        if prev is not None:
            cur = cur[match_order(prev, cur)]
        flags[idx] = cur.size > 1 and _collided(cur)
        series.append(cur)
        prev = cur
    return Trajectory(t_grid, np.array(series), "direct", flags)


def initial_conditions(M0: Triple):
    """``(q0, qdot0)`` at ``t = 0`` in the eigenvalue order of :func:`sorted_eigvals`."""
    s = flow_state(M0, 0.0)
    return s.q, qdot(s)


def compare_with_rs(M0: Triple, lam, t_end=1.0, step=1e-3):
    """Direct and ODE trajectories on the same grid and their max ``|Delta Q|``."""
    q0, p0 = initial_conditions(M0)
    ode = integrate_rs(q0, p0, lam, t_end, step)
    direct = track_eigenvalues(M0, ode.times)
    dev = float(np.max(np.abs(direct.Q - ode.Q)))
    return direct, ode, dev
