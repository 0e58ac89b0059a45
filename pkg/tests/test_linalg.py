import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from aimkp import linalg
from aimkp.errors import DegenerateSpectrum, DimensionMismatch, ExpmOverflow, IllConditioned

from conftest import cofactor_det, crandn


class TestDet:
    def test_matches_cofactor(self, rng):
        for n in range(1, 6):
            a = crandn(rng, n, n)
            assert abs(linalg.det(a) - cofactor_det(a.tolist())) < 1e-12

    def test_rational_example_shift(self):
        # [[2,1,0],[1,1,0],[1,0,1]] expanded by hand: 2*1 - 1*1 = 1
        a = np.array([[2, 1, 0], [1, 1, 0], [1, 0, 1]])
        assert linalg.det(a) == pytest.approx(1.0)

    def test_rejects_non_square(self):
        with pytest.raises(DimensionMismatch):
            linalg.det(np.ones((2, 3)))

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 6), st.integers(0, 2**32 - 1))
    def test_multiplicative(self, n, seed):
        r = np.random.default_rng(seed)
        a, b = crandn(r, n, n), crandn(r, n, n)
        lhs = linalg.det(a @ b)
        rhs = linalg.det(a) * linalg.det(b)
        assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(rhs))


class TestExpm:
    def test_zero(self):
        assert np.allclose(linalg.expm(np.zeros((3, 3))), np.eye(3))

    def test_diagonal(self):
        d = np.array([0.5, -2.0, 3j])
        assert np.allclose(linalg.expm(np.diag(d)), np.diag(np.exp(d)), rtol=1e-14)

    def test_nilpotent(self):
        n = np.array([[0, 1, 0], [0, 0, 1], [0, 0, 0]], dtype=float)
        assert np.allclose(linalg.expm(n), np.eye(3) + n + n @ n / 2, atol=1e-15)

    @pytest.mark.parametrize("scale", [1e-3, 0.1, 1.0, 5.0, 30.0])
    def test_against_eigendecomposition(self, rng, scale):
        a = scale * crandn(rng, 5, 5)
        w, v = np.linalg.eig(a)
        oracle = v @ np.diag(np.exp(w)) @ np.linalg.inv(v)
        got = linalg.expm(a)
        assert np.linalg.norm(got - oracle) <= 1e-9 * np.linalg.norm(oracle)
        assert np.linalg.norm(got - scipy.linalg.expm(a)) <= 1e-11 * np.linalg.norm(oracle)

    def test_inverse_pair(self, rng):
        a = crandn(rng, 4, 4)
        assert np.allclose(linalg.expm(a) @ linalg.expm(-a), np.eye(4), atol=1e-12)

    def test_overflow(self):
        with pytest.raises(ExpmOverflow):
            linalg.expm(np.diag([800.0, 0.0]))


class TestRank:
    def test_outer_product(self, rng):
        v, w = crandn(rng, 5), crandn(rng, 5)
        assert linalg.numerical_rank(np.outer(v, w)) == 1

    def test_zero(self):
        assert linalg.numerical_rank(np.zeros((3, 3))) == 0

    def test_generic(self, rng):
        assert linalg.numerical_rank(crandn(rng, 4, 4)) == 4

    def test_tolerance_is_relative(self):
        a = np.diag([1.0, 1e-8, 1e-11])
        assert linalg.numerical_rank(a) == 2
        assert linalg.numerical_rank(a, tol=1e-7) == 1
        assert linalg.numerical_rank(1e6 * a) == 2

    def test_floor_discards_roundoff(self, rng):
        x, z = np.eye(3) + 0.3 * crandn(rng, 3, 3), crandn(rng, 3, 3)
        noise = x @ z - (x @ z @ np.linalg.inv(x)) @ x
        assert linalg.numerical_rank(noise) > 0
        floor = linalg.roundoff_floor(x, z) + linalg.roundoff_floor(x, z, np.linalg.inv(x), x)
        assert linalg.numerical_rank(noise, floor=floor) == 0

    def test_bad_tol(self):
        with pytest.raises(ValueError):
            linalg.numerical_rank(np.eye(2), tol=0)


class TestAdjugate:
    def test_invertible(self, rng):
        a = crandn(rng, 4, 4)
        assert np.allclose(a @ linalg.adjugate(a), linalg.det(a) * np.eye(4), atol=1e-12)

    def test_rank_deficient_matches_cofactors(self, rng):
        a = np.outer(crandn(rng, 3), crandn(rng, 3)) + np.outer(crandn(rng, 3), crandn(rng, 3))
        cof = np.empty((3, 3), dtype=complex)
        for i in range(3):
            for j in range(3):
                minor = np.delete(np.delete(a, i, 0), j, 1)
                cof[i, j] = (-1) ** (i + j) * cofactor_det(minor.tolist())
        assert np.allclose(linalg.adjugate(a), cof.T, atol=1e-12)

    def test_scalar(self):
        assert linalg.adjugate(np.array([[5.0]]))[0, 0] == pytest.approx(1.0)


class TestEig:
    def test_ordering(self):
        a = np.diag([2.0, -1.0, 1j, -1j])
        w, v = linalg.eig(a)
        assert np.allclose(w, [-1, -1j, 1j, 2])
        assert np.allclose(a @ v, v * w)

    def test_jordan_block_rejected(self):
        with pytest.raises(DegenerateSpectrum):
            linalg.eig(np.array([[1.0, 1.0], [0.0, 1.0]]))


class TestInvertibility:
    def test_ill_conditioned(self):
        with pytest.raises(IllConditioned):
            linalg.check_invertible(np.diag([1.0, 1e-14]))

    def test_inv(self, rng):
        a = np.eye(3) + 0.3 * crandn(rng, 3, 3)
        assert np.allclose(linalg.inv(a) @ a, np.eye(3))

    def test_commutator(self):
        a = np.array([[0, 1], [0, 0]])
        b = a.T
        assert np.allclose(linalg.commutator(a, b), np.diag([1, -1]))
