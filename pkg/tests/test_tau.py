import numpy as np
import pytest

from aimkp.errors import PreconditionError, SingularTau
from aimkp.linalg import det, expm
from aimkp.serialize import read_triple
from aimkp.tau import (
    HIROTA_TIME_SUPPORT,
    double_miwa_shift_tau,
    draw_hirota_point,
    h1,
    h2,
    h_closed_form_2x2,
    h_poly,
    h_poly_grid,
    hirota_residual,
    kdv_factorization_check,
    kp_residual,
    miwa_shift_tau,
    rational_polynomial,
    soliton_sum_tau,
    tau,
    tau_hat,
    u_field,
    u_value,
)
from aimkp.times import TimeVector, g_eval
from aimkp.triples import (
    SpectralSolitonData,
    Triple,
    flow,
    random_full_rank,
    random_kappa_one,
    random_soliton_data,
    rational_example,
    soliton_triple,
)

from conftest import crandn


def one_soliton():
    return Triple([[1.0]], [[-1.0]], [[1.0]])


class TestTau:
    def test_origin(self, rng):
        M = random_kappa_one(rng, 3)
        assert tau(M, TimeVector()) == pytest.approx(det(M.X + np.eye(3)))

    def test_scalar_one_soliton(self):
        lam, mu, x = 0.7, -0.3, 1.3
        M = Triple([[1.0]], [[mu]], [[lam]])
        assert tau(M, TimeVector.of(x)) == pytest.approx(np.exp(x * lam) + np.exp(x * mu))

    def test_trivial_triple(self, rng):
        a = crandn(rng, 3, 3)
        t = TimeVector({1: 0.4, 2: -0.3j, 3: 0.2})
        M = Triple(np.eye(3), a, a)
        w = np.linalg.eigvals(a)
        expected = 2**3 * np.exp(sum(t[i] * np.sum(w**i) for i in (1, 2, 3)))
        assert tau(M, t) == pytest.approx(expected, rel=1e-12)

    def test_tau_hat_gauge(self, rng):
        M = random_kappa_one(rng, 4)
        t = TimeVector({1: 0.5, 3: 0.2j})
        assert tau_hat(M, t) * det(expm(g_eval(M.Y, t))) == pytest.approx(tau(M, t), rel=1e-12)

    def test_conjugation_invariance(self, rng):
        M = random_full_rank(rng, 3)
        g = np.eye(3) + 0.3 * crandn(rng, 3, 3)
        gi = np.linalg.inv(g)
        N = Triple(g @ M.X @ gi, g @ M.Y @ gi, g @ M.Z @ gi)
        t = TimeVector({1: 0.3, 2: 0.2})
        assert tau(N, t) == pytest.approx(tau(M, t), rel=1e-12)


class TestMiwa:
    @pytest.mark.parametrize("a", [3.0, -2.5 + 2j, 4j])
    def test_against_truncated_series(self, rng, a):
        M = random_kappa_one(rng, 3)
        M = Triple(0.5 * M.X, 0.5 * M.Y, 0.5 * M.Z)
        t = TimeVector({1: 0.2, 2: 0.1j})
        shift = TimeVector.miwa(1 / a, 60)
        series = tau(M, TimeVector(t.as_dict(), max_index=60) - shift)
        assert miwa_shift_tau(M, t, a) == pytest.approx(series, rel=1e-12)

    def test_h1_relation(self, rng):
        # tau(t - [1/a]) = a^{-n} det(e^{g(Y)}) H1(a) with Xhat = e^{-g(Y)} X e^{g(Z)}
        M = random_kappa_one(rng, 4)
        t = TimeVector({1: 0.3, 2: -0.2, 5: 0.1j})
        a = 1.7 - 0.4j
        xhat = flow(M, t).X
        rhs = a**-4 * det(expm(g_eval(M.Y, t))) * h1(xhat, M.Y, M.Z, a)
        assert miwa_shift_tau(M, t, a) == pytest.approx(rhs, rel=1e-12)

    def test_h2_relation(self, rng):
        M = random_kappa_one(rng, 3)
        t = TimeVector({1: 0.3, 3: 0.2})
        a, b = 1.5, -2.0 + 1j
        xhat = flow(M, t).X
        rhs = (a * b) ** -3 * det(expm(g_eval(M.Y, t))) * h2(xhat, M.Y, M.Z, a, b)
        assert (a - b) * double_miwa_shift_tau(M, t, a, b) == pytest.approx(rhs, rel=1e-12)

    def test_double_symmetric(self, rng):
        M = random_full_rank(rng, 3)
        t = TimeVector.of(0.2)
        assert double_miwa_shift_tau(M, t, 2, 3j) == pytest.approx(double_miwa_shift_tau(M, t, 3j, 2))

    def test_zero_parameter(self, rng):
        with pytest.raises(PreconditionError):
            miwa_shift_tau(random_kappa_one(rng, 2), TimeVector(), 0)


class TestHirota:
    def test_protocol(self, rng):
        for _ in range(50):
            a, b, c, t = draw_hirota_point(rng)
            pts = np.array([a, b, c])
            assert np.all((np.abs(pts) >= 0.5) & (np.abs(pts) <= 4.0))
            assert min(abs(a - b), abs(a - c), abs(b - c)) >= 0.1
            assert set(t.support) <= set(HIROTA_TIME_SUPPORT)
            assert all(abs(v) <= 1 for v in t.as_dict().values())

    def test_kappa_one(self, rng):
        for n in range(1, 6):
            M = random_kappa_one(rng, n)
            for _ in range(5):
                assert hirota_residual(M, *_args(rng)).relative < 1e-10

    def test_one_soliton_closed(self):
        s = hirota_residual(one_soliton(), TimeVector({1: 0.3, 2: 0.1}), 2.0, -1.5, 3j)
        assert s.relative < 1e-13

    def test_full_rank_fails(self, rng):
        rels = [hirota_residual(random_full_rank(rng, 3), *_args(rng)).relative for _ in range(5)]
        assert min(rels) > 1e-4

    def test_pinned_control_fixture(self, fixtures):
        M = read_triple(fixtures / "full_rank3.json")
        s = hirota_residual(M, TimeVector({1: 0.5, 2: 0.3j, 3: -0.2, 5: 0.1}), 2.0, -1.0 + 1.5j, 3.0j)
        assert M.kappa == 3
        assert s.relative == pytest.approx(PINNED_CONTROL_RESIDUAL, rel=1e-9)
        assert s.relative > 1e-3


# independent route: truncated Miwa series (order 200) gives 0.015433264293230414
PINNED_CONTROL_RESIDUAL = 0.0154332642932


def _args(rng):
    a, b, c, t = draw_hirota_point(rng)
    return t, a, b, c


class TestHPoly:
    def test_vanishes_kappa_le_one(self, rng):
        for M in (random_kappa_one(rng, 4), rational_example(1.5)):
            pts = 2.5 * np.exp(2j * np.pi * np.arange(12) / 12)
            value, scale = h_poly_grid(M.X, M.Y, M.Z, pts[:4], pts[4:8], pts[8:])
            assert np.max(np.abs(value) / scale) < 1e-11

    def test_nonzero_full_rank(self, rng):
        M = random_full_rank(rng, 3)
        assert abs(h_poly(M.X, M.Y, M.Z, 1.0, 2.0j, -1.5)) > 1e-3

    def test_grid_matches_pointwise(self, rng):
        M = random_full_rank(rng, 2)
        value, _ = h_poly_grid(M.X, M.Y, M.Z, [1.0], [2.0, 3.0], [-1j])
        assert value[0, 1, 0] == pytest.approx(h_poly(M.X, M.Y, M.Z, 1.0, 3.0, -1j))

    def test_2x2_closed_form(self, rng):
        for _ in range(20):
            xh, y, z = crandn(rng, 2, 2), crandn(rng, 2, 2), crandn(rng, 2, 2)
            a, b, c = crandn(rng, 3) * 2
            h = h_poly(xh, y, z, a, b, c)
            assert abs(h - h_closed_form_2x2(xh, y, z, a, b, c)) < 1e-12 * max(1, abs(h))

    def test_2x2_opposite_orientation_differs(self, rng):
        xh, y, z = crandn(rng, 2, 2), crandn(rng, 2, 2), crandn(rng, 2, 2)
        h = h_poly(xh, y, z, 1.0, 2.0, -1j)
        assert h_closed_form_2x2(xh, y, z, 1.0, 2.0, -1j, sign=+1) == pytest.approx(-h)

    def test_2x2_only(self):
        with pytest.raises(ValueError):
            h_closed_form_2x2(np.eye(3), np.eye(3), np.eye(3), 1, 2, 3)


class TestKdV:
    def test_fixture(self, fixtures):
        M = read_triple(fixtures / "kdv3.json")
        for x, t2 in ((0.3, 0.5), (-0.7, 0.2 - 0.6j)):
            assert kdv_factorization_check(M, 2, TimeVector({1: x, 2: t2})) < 1e-12
            assert kdv_factorization_check(M, 2, TimeVector({1: x, 4: t2})) < 1e-12

    def test_generic_fails(self, fixtures):
        M = read_triple(fixtures / "generic_kappa1.json")
        assert kdv_factorization_check(M, 2, TimeVector({1: 0.3, 2: 0.5})) > 1e-3

    def test_support_checked(self, fixtures):
        M = read_triple(fixtures / "kdv3.json")
        with pytest.raises(PreconditionError):
            kdv_factorization_check(M, 2, TimeVector({1: 0.3, 3: 0.5}))


class TestSolitonSum:
    def test_one_soliton(self):
        data = SpectralSolitonData([2.0], [1.0], [0.5], [-0.5])
        t = TimeVector({1: 0.3, 2: 0.2})
        expected = 1 + 2.0 * np.exp((0.5 - (-0.5)) * 0.3 + (0.25 - 0.25) * 0.2)
        assert soliton_sum_tau(data, t) == pytest.approx(expected)

    @pytest.mark.parametrize("n", range(1, 9))
    def test_against_determinant(self, rng, n):
        data = random_soliton_data(rng, n)
        t = draw_hirota_point(rng)[3]
        ref = tau_hat(soliton_triple(data), t)
        assert abs(soliton_sum_tau(data, t) - ref) < 1e-10 * abs(ref)


class TestU:
    @pytest.mark.parametrize("method", ["fd", "jacobi"])
    def test_one_soliton_peak(self, method):
        assert u_value(one_soliton(), 0.0, method=method) == pytest.approx(2.0, rel=1e-8)

    @pytest.mark.parametrize("x", [-1.2, 0.4, 2.0])
    def test_sech_profile(self, x):
        exact = 2 / np.cosh(x) ** 2
        assert u_value(one_soliton(), x, method="jacobi").real == pytest.approx(exact, rel=1e-12)
        # finite differences at h = 1e-3 are limited by rounding to about 1e-8
        assert u_value(one_soliton(), x).real == pytest.approx(exact, rel=1e-7)

    def test_factor(self):
        assert u_value(one_soliton(), 0.3, factor=1.0) == pytest.approx(u_value(one_soliton(), 0.3) / 2)

    def test_field_shape(self):
        x = np.linspace(-1, 1, 4)
        assert u_field(one_soliton(), x[:, None], np.zeros((1, 3))).shape == (4, 3)

    def test_singular(self):
        with pytest.raises(SingularTau):
            u_value(Triple([[-1.0]], [[0.0]], [[0.0]]), 0.0)

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            u_value(one_soliton(), 0.0, method="spline")


class TestKP:
    def test_one_soliton(self):
        M = soliton_triple(SpectralSolitonData([1.0], [1.0], [0.8], [-0.6]))
        assert kp_residual(M, 0.3, 0.2, -0.1).relative < 1e-6

    def test_two_soliton_factor(self, fixtures):
        from aimkp.serialize import read_spectral

        M = soliton_triple(read_spectral(fixtures / "kp_two_soliton_spectral.json"))
        assert kp_residual(M, 0.5, -0.3, 0.2).relative < 1e-4
        assert kp_residual(M, 0.5, -0.3, 0.2, factor=1.0).relative > 1e-2


class TestRationalPolynomial:
    @pytest.mark.parametrize("lam", [2.0, 0.5, 1j])
    def test_matches_determinant(self, rng, lam):
        M = rational_example(lam)
        for x, y, s in rng.uniform(-1, 1, (5, 3)):
            assert tau_hat(M, TimeVector.xyt(x, y, s)) == pytest.approx(rational_polynomial(lam, x, y, s), rel=1e-11)

    def test_linear_y_variant_is_not_tau(self):
        M = rational_example(2.0)
        v = tau_hat(M, TimeVector.xyt(0.1, 0.7, -0.2))
        assert abs(v - rational_polynomial(2.0, 0.1, 0.7, -0.2, linear_y=True)) > 0.1

    def test_variant_agrees_where_terms_coincide(self):
        # y^2 = y at y in {0, 1}
        for y in (0.0, 1.0):
            assert rational_polynomial(2, 0.3, y, 0.1) == pytest.approx(rational_polynomial(2, 0.3, y, 0.1, True))
