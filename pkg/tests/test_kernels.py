import numpy as np
import pytest

from aimkp import _core
from aimkp._core import _fallback

from conftest import cofactor_det, crandn

BACKENDS = sorted(_core.backends().items())


def subset_sum_oracle(w, pair):
    n = len(w)
    total = 0
    for mask in range(1 << n):
        idx = [i for i in range(n) if mask >> i & 1]
        term = 1
        for i in idx:
            term *= w[i]
        for a in range(len(idx)):
            for b in range(a + 1, len(idx)):
                term *= pair[idx[a], idx[b]]
        total += term
    return total


class TestBackendSelection:
    def test_backend_name(self):
        assert _core.BACKEND in ("python", "cython")
        assert "python" in _core.backends()

    def test_fallback_always_available(self):
        assert _core.backends()["python"] is _fallback


@pytest.mark.parametrize("name,mod", BACKENDS)
class TestKernels:
    def test_lu_det_vs_cofactor(self, name, mod, rng):
        for n in range(1, 6):
            a = crandn(rng, n, n)
            expected = cofactor_det(a.tolist())
            assert abs(mod.lu_det(a) - expected) <= 1e-12 * max(1.0, abs(expected))

    def test_lu_det_singular(self, name, mod):
        a = np.array([[1, 2], [2, 4]], dtype=complex)
        assert abs(mod.lu_det(a)) < 1e-14

    def test_lu_det_needs_pivoting(self, name, mod):
        a = np.array([[0, 1], [1, 0]], dtype=complex)
        assert mod.lu_det(a) == -1

    def test_det_batch(self, name, mod, rng):
        stack = crandn(rng, 7, 4, 4)
        got = mod.det_batch(stack)
        for k in range(7):
            assert abs(got[k] - cofactor_det(stack[k].tolist())) < 1e-12

    def test_subset_sum(self, name, mod, rng):
        for n in (1, 2, 5, 7):
            w = crandn(rng, n)
            pair = crandn(rng, n, n)
            pair = (pair + pair.T) / 2
            expected = subset_sum_oracle(w, pair)
            assert abs(mod.subset_sum(w, pair) - expected) <= 1e-12 * max(1.0, abs(expected))

    def test_subset_sum_empty_interactions(self, name, mod):
        w = np.array([1.0, 2.0, 3.0], dtype=complex)
        pair = np.ones((3, 3), dtype=complex)
        assert mod.subset_sum(w, pair) == pytest.approx((1 + 1) * (1 + 2) * (1 + 3))


def test_backends_agree(rng):
    mods = dict(BACKENDS)
    if len(mods) < 2:
        pytest.skip("compiled extension not built")
    a = crandn(rng, 6, 6)
    assert abs(mods["cython"].lu_det(a) - mods["python"].lu_det(a)) < 1e-12 * abs(mods["python"].lu_det(a))
    w, pair = crandn(rng, 8), crandn(rng, 8, 8)
    assert abs(mods["cython"].subset_sum(w, pair) - mods["python"].subset_sum(w, pair)) < 1e-10


def test_env_forces_fallback():
    import subprocess
    import sys

    out = subprocess.run([sys.executable, "-c", "import aimkp; print(aimkp.BACKEND)"],
                         env={"AIMKP_PURE_PYTHON": "1", "PATH": ""}, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
