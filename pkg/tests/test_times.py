import numpy as np
import pytest

from aimkp.times import TimeVector, g_eval, g_scalar


class TestTimeVector:
    def test_zero_entries_dropped(self):
        assert TimeVector({1: 0.5, 2: 0, 3: 1j}).support == (1, 3)
        assert TimeVector({2: 0}).is_zero()

    def test_equality_ignores_zeros(self):
        assert TimeVector({1: 1.0, 4: 0}) == TimeVector.of(1.0)

    def test_getitem_default(self):
        t = TimeVector({3: 2.0})
        assert t[3] == 2.0 and t[1] == 0

    def test_index_bounds(self):
        with pytest.raises(ValueError):
            TimeVector({0: 1.0})
        with pytest.raises(ValueError):
            TimeVector({17: 1.0})
        assert TimeVector({17: 1.0}, max_index=20).degree == 17

    def test_non_finite(self):
        with pytest.raises(ValueError):
            TimeVector({1: float("nan")})

    def test_arithmetic(self):
        a = TimeVector({1: 1.0, 2: 2.0})
        b = TimeVector({2: 2.0, 3: 1.0})
        assert (a - b).as_dict() == {1: 1.0, 3: -1.0}
        assert (a + b)[2] == 4.0

    def test_replace(self):
        assert TimeVector.xyt(1.0, 2.0, 3.0).replace(t2=0).support == (1, 3)

    def test_miwa(self):
        m = TimeVector.miwa(2.0, 4)
        assert [m[i] for i in range(1, 5)] == [2.0, 2.0, 8 / 3, 4.0]


class TestG:
    def test_zero_time(self):
        assert np.allclose(g_eval(np.ones((2, 2)), TimeVector()), 0)

    def test_first_time(self):
        w = np.array([[1, 2], [3, 4]])
        assert np.allclose(g_eval(w, TimeVector.of(0.5)), 0.5 * w)

    def test_scalar_instance(self):
        # t = (1, 1): 2 + 4 = 6
        assert np.allclose(g_eval(np.diag([2.0]), TimeVector.of(1, 1)), [[6.0]])

    def test_against_powers(self, rng):
        w = rng.standard_normal((3, 3))
        t = TimeVector({1: 0.3, 2: -0.2j, 5: 0.1})
        oracle = 0.3 * w - 0.2j * w @ w + 0.1 * np.linalg.matrix_power(w, 5)
        assert np.allclose(g_eval(w, t), oracle, atol=1e-13)

    def test_scalar(self):
        t = TimeVector({1: 1.0, 3: 2.0})
        assert g_scalar(2.0, t) == pytest.approx(2 + 16)
