import numpy as np
import pytest

from aimkp import eigenflow
from aimkp.errors import DegenerateSpectrum, PreconditionError
from aimkp.serialize import read_triple
from aimkp.suite import rs_triple
from aimkp.times import TimeVector
from aimkp.triples import flow, linear_reduction_triple, random_full_rank, random_kappa_one


@pytest.fixture(scope="module")
def rs3():
    return rs_triple(0)


def fd(f, t, h=1e-3):
    return (f(t - 2 * h) - 8 * f(t - h) + 8 * f(t + h) - f(t + 2 * h)) / (12 * h)


def fd2(f, t, h=1e-3):
    return (-f(t - 2 * h) + 16 * f(t - h) - 30 * f(t) + 16 * f(t + h) - f(t + 2 * h)) / (12 * h * h)


class TestFrame:
    def test_rank_one_factors(self, rng):
        M = random_kappa_one(rng, 4)
        v, w = eigenflow.rank_one_factors(M)
        assert np.allclose(np.outer(v, w), M.defect(), atol=1e-12)
        assert np.linalg.norm(w) == pytest.approx(1.0)
        lead = w[np.flatnonzero(np.abs(w) > 1e-14)[0]]
        assert lead.imag == pytest.approx(0.0, abs=1e-15) and lead.real > 0

    def test_needs_kappa_one(self, rng):
        with pytest.raises(PreconditionError):
            eigenflow.flow_state(random_full_rank(rng, 3), 0.1)

    def test_linear1(self, rs3):
        s = eigenflow.flow_state(rs3, 0.4)
        assert s.linear1_residual() < 1e-12 * np.max(np.abs(s.P()))

    def test_gauge(self, rs3):
        s = eigenflow.normalize_gauge(eigenflow.flow_state(rs3, 0.2))
        assert np.allclose(s.what, 1)
        assert s.linear1_residual() < 1e-11 * np.max(np.abs(s.P()))

    def test_dotqs_fd(self, rs3):
        s = eigenflow.flow_state(rs3, 0.3)
        Q = lambda t: eigenflow.flow_state(rs3, t, order_ref=s.Q).Q  # noqa: E731
        assert np.allclose(fd(Q, 0.3), s.Qdot(), rtol=1e-8, atol=1e-8)

    def test_motion3_fd(self, rs3):
        s = eigenflow.flow_state(rs3, 0.6)
        q = lambda t: eigenflow.flow_state(rs3, t, order_ref=s.Q, q_ref=s.q).q  # noqa: E731
        assert np.allclose(fd(q, 0.6), eigenflow.qdot(s), rtol=1e-8, atol=1e-8)

    def test_acceleration_fd(self, rs3):
        s = eigenflow.flow_state(rs3, 0.5)
        q = lambda t: eigenflow.flow_state(rs3, t, order_ref=s.Q, q_ref=s.q).q  # noqa: E731
        assert np.allclose(fd2(q, 0.5, 1e-2), eigenflow.general_acceleration(s), rtol=1e-6, atol=1e-6)

    def test_dual_forms(self, rng):
        M = random_kappa_one(rng, 4, "sylvester")
        comm, explicit = eigenflow.acceleration_forms(eigenflow.flow_state(M, 0.1))
        assert np.allclose(comm, explicit, rtol=1e-9, atol=1e-9)


class TestReduction:
    @pytest.mark.parametrize("lam", [-1.0, 2.0, 0.5 + 0.5j])
    @pytest.mark.parametrize("gamma", [0.0, 1.0, -2j])
    def test_closed_system_matches_general(self, lam, gamma):
        M = linear_reduction_triple([0.3 + 0.1j, -0.5, 0.9 - 0.2j], lam, gamma, [1.0, 0.7, 1.3], [0.8, 1.1, 1.0])
        s = eigenflow.flow_state(M, 0.2)
        rhs = eigenflow.rs_rhs(s.Q, s.Qdot(), lam)
        assert np.allclose(rhs, eigenflow.general_acceleration(s), rtol=1e-8, atol=1e-10)

    def test_trivial_lambda(self):
        assert np.allclose(eigenflow.rs_rhs([1.0, 2.0], [0.3, 0.1], 1.0), 0)

    def test_degenerate(self):
        with pytest.raises(DegenerateSpectrum):
            eigenflow.rs_rhs([1.0, 1.0], [0.3, 0.1], -1.0)


class TestTrajectories:
    @pytest.mark.parametrize("name,lam", [("rs3_lam-1.json", -1.0), ("rs3_lam2_gamma1.json", 2.0)])
    def test_rk4_vs_direct(self, fixtures, name, lam):
        direct, ode, dev = eigenflow.compare_with_rs(read_triple(fixtures / name), lam, 1.0, 1e-3)
        assert not direct.flagged and not ode.flagged
        assert dev < 1e-6

    def test_wrong_lambda_deviates(self, fixtures):
        _, _, dev = eigenflow.compare_with_rs(read_triple(fixtures / "rs3_lam-1.json"), 2.0, 0.5, 1e-2)
        assert dev > 1e-3

    def test_tracking_matches_eigvals(self, rs3):
        traj = eigenflow.track_eigenvalues(rs3, np.linspace(0, 1, 11))
        for t, Q in zip(traj.times, traj.Q):
            expected = np.linalg.eigvals(flow(rs3, TimeVector.of(t)).X)
            assert np.allclose(np.sort_complex(Q), np.sort_complex(expected))
        assert np.max(np.abs(np.diff(traj.Q, axis=0))) < 0.5

    def test_match_order(self):
        assert list(eigenflow.match_order([1, 2, 3], [2.9, 1.1, 2.05])) == [1, 2, 0]

    def test_bad_step(self):
        with pytest.raises(ValueError):
            eigenflow.integrate_rs([0.0, 1.0], [0.1, 0.2], -1, 1.0, 0)
