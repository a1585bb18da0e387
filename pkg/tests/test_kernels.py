import math

import numpy as np
import pytest

from imprand import _kernels_numpy as npk
from imprand import kernels

nbk = pytest.importorskip("imprand._kernels_numba")


def test_backend_selection():
    assert kernels.BACKEND_NAME in ("numba", "numpy")


def test_log_capital_agree(rng):
    for _ in range(20):
        n = int(rng.integers(0, 300))
        m1, m0 = rng.uniform(0, 2, (2, n))
        m1[rng.random(n) < 0.01] = 0.0
        bits = rng.integers(0, 2, n).astype(np.uint8)
        a, bad_a = npk.log_capital(m1, m0, bits)
        b, bad_b = nbk.log_capital(m1, m0, bits)
        assert bad_a == bad_b == -1
        np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-12)
        assert np.array_equal(np.isneginf(a), np.isneginf(b))


def test_log_capital_negative_detected():
    m1 = np.array([1.0, -0.5, 1.0])
    m0 = np.array([1.0, 1.0, 1.0])
    bits = np.array([1, 1, 1], dtype=np.uint8)
    assert npk.log_capital(m1, m0, bits)[1] == 1
    assert nbk.log_capital(m1, m0, bits)[1] == 1
    # a negative value on the branch not taken is not consumed
    assert npk.log_capital(m1, m0, np.array([1, 0, 1], dtype=np.uint8))[1] == -1


def test_mixture_agree(rng):
    for _ in range(10):
        n = int(rng.integers(1, 500))
        inc = rng.uniform(-1, 1, n)
        sel = (rng.random(n) < 0.6).astype(np.float64)
        R = int(rng.integers(1, 25))
        xis = 1.0 / 2.0 ** (np.arange(1, R + 1) + 1)
        lw = -np.arange(1, R + 1) * math.log(2)
        a = npk.mixture_log_capital(inc, sel, xis, lw, -R * math.log(2))
        b = nbk.mixture_log_capital(inc, sel, xis, lw, -R * math.log(2))
        np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-12)
        assert a[0] == pytest.approx(0.0, abs=1e-15)


def test_cap_mix_agree(rng):
    for _ in range(10):
        n = int(rng.integers(1, 400))
        logT = np.concatenate(([0.0], np.cumsum(rng.normal(0.05, 0.5, n))))
        a = npk.cap_mix_log(logT, 40, 1e-12)
        b = nbk.cap_mix_log(logT, 40, 1e-12)
        np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-12)


def test_backward_agree(rng):
    for depth in range(0, 9):
        vals = rng.normal(size=2**depth)
        lo = rng.uniform(0, 0.5, 2**depth - 1)
        hi = lo + rng.uniform(0, 0.5, 2**depth - 1)
        assert npk.backward_lower(vals, lo, hi, depth) == pytest.approx(
            nbk.backward_lower(vals, lo, hi, depth), abs=1e-12)
