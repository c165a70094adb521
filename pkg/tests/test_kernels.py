"""Numba and numpy kernel twins must agree bit for bit."""

import os
import subprocess
import sys

import numpy as np
import pytest

from obsent import _kernels as K

needs_numba = pytest.mark.skipif(not K.HAVE_NUMBA, reason="numba not active")


def test_active_backend_value():
    assert K.ACTIVE_BACKEND in ("numba", "numpy")
    if K.HAVE_NUMBA:
        assert K.ACTIVE_BACKEND == "numba"
        assert K.popcount is K.popcount_numba
    else:
        assert K.popcount is K.popcount_numpy


def test_popcount_numpy_reference():
    rng = np.random.default_rng(0)
    v = rng.integers(0, 1 << 28, size=200, dtype=np.int64)
    want = np.array([bin(int(x)).count("1") for x in v], dtype=np.int64)
    assert np.array_equal(K.popcount_numpy(v), want)


@needs_numba
def test_popcount_twins_agree():
    rng = np.random.default_rng(1)
    v = rng.integers(0, 1 << 28, size=500, dtype=np.int64)
    assert np.array_equal(K.popcount_numba(v), K.popcount_numpy(v))


@needs_numba
@pytest.mark.parametrize("L,N", [(1, 0), (4, 2), (8, 3), (12, 6), (16, 4)])
def test_enumerate_states_twins_agree(L, N):
    assert np.array_equal(K.enumerate_states_numba(L, N),
                          K.enumerate_states_numpy(L, N))


@needs_numba
def test_signature_codes_twins_agree():
    rng = np.random.default_rng(2)
    states = np.sort(rng.choice(1 << 16, size=300, replace=False)).astype(np.int64)
    for edges in ([0, 4, 8, 12, 16], [0, 16], [0, 5, 16], [0, 1, 2, 16]):
        e = np.asarray(edges, dtype=np.int64)
        assert np.array_equal(K.signature_codes_numba(states, e),
                              K.signature_codes_numpy(states, e))


@needs_numba
@pytest.mark.parametrize(
    "L,N,k,l,params",
    [
        (6, 3, 1, 6, (1.0, 1.0, 0.0, 0.0)),
        (6, 3, 1, 6, (0.9, 1.3, 0.45, 0.27)),
        (8, 4, 2, 7, (1.0, 1.0, 0.96, 0.96)),
        (8, 4, 1, 4, (0.0, 1.0, 0.5, 0.0)),
        (10, 5, 1, 10, (1.0, 0.37, 0.21, 0.11)),
    ],
)
def test_fill_hamiltonian_twins_agree(L, N, k, l, params):
    states = K.enumerate_states_numpy(L, N)
    A = K.fill_hamiltonian_numba(states, k, l, *params)
    B = K.fill_hamiltonian_numpy(states, k, l, *params)
    assert np.array_equal(A, B)


def test_disable_flag_selects_numpy_backend():
    env = dict(os.environ, OBSENT_DISABLE_NUMBA="1")
    out = subprocess.run(
        [sys.executable, "-c",
         "from obsent import _kernels as K; "
         "print(K.ACTIVE_BACKEND, K.HAVE_NUMBA, K.popcount is K.popcount_numpy)"],
        capture_output=True, text=True, env=env, check=True,
    )
    assert out.stdout.split() == ["numpy", "False", "True"]
