import itertools
from math import comb

import numpy as np
import pytest

from kamdea import _kernels
from kamdea.oracle import random_instance

needs_numba = pytest.mark.skipif(not _kernels.NUMBA_AVAILABLE, reason="numba not installed")


@pytest.mark.parametrize("total, parts", [(0, 1), (5, 1), (0, 3), (4, 2), (6, 3), (5, 4), (3, 6)])
def test_compositions_enumerates_every_composition_once(total, parts):
    C = _kernels.compositions(total, parts)
    assert C.shape == (comb(total + parts - 1, parts - 1), parts)
    assert np.all(C.sum(axis=1) == total)
    assert np.all(C >= 0)
    brute = {
        t for t in itertools.product(range(total + 1), repeat=parts) if sum(t) == total
    }
    assert {tuple(r) for r in C} == brute


def test_compositions_odometer_order():
    # first coordinate varies fastest
    C = _kernels.compositions(2, 3)
    expected = [(0, 0, 2), (1, 0, 1), (2, 0, 0), (0, 1, 1), (1, 1, 0), (0, 2, 0)]
    assert [tuple(r) for r in C] == expected


def test_backend_resolution(monkeypatch):
    assert _kernels.get_backend("numpy") == "numpy"
    with pytest.raises(ValueError):
        _kernels.get_backend("fortran")


def _scan_args(d, l, eps, N):
    X, Y = d.inputs, d.outputs
    e_in, e_out = eps * X[l], eps * Y[l]
    tau_in = np.full(d.m, 0.05)
    tau_out = np.full(d.p, 0.05)
    return (X, Y, X[l].copy(), Y[l].copy(), e_in, e_out, 1 / X[l], 1 / Y[l], N, tau_in, tau_out, 1e-9)


@needs_numba
@pytest.mark.parametrize("seed, n, m, p, N", [(1, 1, 2, 2, 1), (2, 2, 1, 2, 50), (3, 4, 2, 2, 12), (4, 6, 1, 3, 8)])
def test_grid_scan_backends_agree(seed, n, m, p, N):
    d = random_instance(seed, n, m, p)
    args = _scan_args(d, seed % n, 0.1, N)
    a = _kernels.grid_scan_numpy(*args)
    b = _kernels.grid_scan_numba(*args)
    assert a[0] == pytest.approx(b[0], abs=1e-12)
    assert a[2] == pytest.approx(b[2], abs=1e-12)
    assert a[3] == b[3]


@needs_numba
def test_simplex_kernels_agree_pivot_by_pivot():
    rng = np.random.default_rng(7)
    m, ncol = 5, 9
    T = np.zeros((m + 1, ncol + 1))
    T[:m, :4] = rng.uniform(0.1, 1, size=(m, 4))
    T[:m, 4:ncol] = np.eye(m)
    T[:m, -1] = rng.uniform(1, 2, size=m)
    T[m, :4] = -rng.uniform(1, 2, size=4)
    basis0 = np.arange(4, 4 + m, dtype=np.int64)
    T1, T2 = T.copy(), T.copy()
    b1, b2 = basis0.copy(), basis0.copy()
    s1 = _kernels.simplex_loop_numpy(T1, b1, ncol, 1e-9, 100)
    s2 = _kernels.simplex_loop_numba(T2, b2, ncol, 1e-9, 100)
    assert s1 == s2
    np.testing.assert_array_equal(b1, b2)
    np.testing.assert_allclose(T1, T2, atol=1e-12)
