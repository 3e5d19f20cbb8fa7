"""The compiled kernels and the numpy fallback must agree."""
import math

import numpy as np
import pytest

from zpc import _backend, _pykernels
from zpc._rscoef import psi_derivative_table, theta_coefficients

ck = pytest.importorskip("zpc._ckernels")


def test_selected_backend_name():
    assert _backend.NAME in ("cython", "python")


def test_rs_z_agrees():
    t = np.concatenate([np.linspace(30, 200, 500), np.linspace(1e4, 1.001e4, 200), [1e6, 3.3e6]])
    zc, ec = ck.rs_z_batch(t, psi_derivative_table(), theta_coefficients(), 2)
    zp, ep = _pykernels.rs_z_batch(t, psi_derivative_table(), theta_coefficients(), 1)
    assert np.max(np.abs(zc - zp)) < 1e-9
    assert np.allclose(ec, ep, rtol=1e-6, atol=0)


def test_fejer_agrees():
    rng = np.random.default_rng(3)
    g = np.sort(rng.uniform(10, 3000, 1500))
    m = rng.integers(1, 3, g.size).astype(float)
    a = ck.fejer_offdiag(g, m, math.log(3000.0), 1)
    b = _pykernels.fejer_offdiag(g, m, math.log(3000.0), 1)
    assert abs(a - b) <= 1e-12 * abs(a)


def test_fejer_thread_determinism():
    g = np.sort(np.random.default_rng(5).uniform(10, 3000, 2000))
    m = np.ones_like(g)
    assert len({ck.fejer_offdiag(g, m, 8.0, k) for k in (1, 2, 4, 7)}) == 1
    assert len({_pykernels.fejer_offdiag(g, m, 8.0, k) for k in (1, 3)}) == 1


@pytest.mark.parametrize("delta", [0.0, 0.01, 0.3, 5.0])
def test_pair_count_agrees(delta):
    rng = np.random.default_rng(11)
    g = np.sort(np.round(rng.uniform(10, 200, 800), 2))  # rounding forces ties
    m = rng.integers(1, 4, g.size).astype(np.int_)
    a = ck.window_pair_count(g, m, delta)
    b = _pykernels.window_pair_count(g, m, delta)
    brute = int(np.sum(m[:, None] * m[None, :] * (np.abs(g[:, None] - g[None, :]) <= delta)))
    assert a == b == brute
