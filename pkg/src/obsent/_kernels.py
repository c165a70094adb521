"""Bit-level hot kernels: numba fast path with a pure-numpy fallback.

The active path is chosen at import time.  Setting the environment variable
``OBSENT_DISABLE_NUMBA`` to any non-empty value forces the numpy fallback;
otherwise numba is used when importable.  When numba is active, both
variants are exported (``*_numba`` / ``*_numpy``) so the test suite and
``benchmarks/bench_kernels.py`` can compare them head to head.

All kernels operate on int64 occupation bitstrings (bit s-1 = site s) in
ascending order, which makes index lookup a searchsorted.
"""

from __future__ import annotations

import itertools
import os

import numpy as np

_DISABLED = bool(os.environ.get("OBSENT_DISABLE_NUMBA"))

HAVE_NUMBA = False
if not _DISABLED:
    try:
        from numba import njit as _njit

        HAVE_NUMBA = True
    except ImportError:  # pragma: no cover - environment without numba
        HAVE_NUMBA = False

ACTIVE_BACKEND = "numba" if HAVE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# numpy fallback implementations
# ---------------------------------------------------------------------------


def popcount_numpy(v: np.ndarray) -> np.ndarray:
    """Set-bit count per element (int64 result)."""
    return np.bitwise_count(np.asarray(v, dtype=np.uint64)).astype(np.int64)


def enumerate_states_numpy(L: int, N: int) -> np.ndarray:
    """All N-bit patterns on L bits, ascending by integer value."""
    if N == 0:
        return np.zeros(1, dtype=np.int64)
    combos = np.array(list(itertools.combinations(range(L), N)), dtype=np.int64)
    states = (np.int64(1) << combos).sum(axis=1)
    return np.sort(states)


def signature_codes_numpy(states: np.ndarray, edges: np.ndarray) -> np.ndarray:
    """Per-box popcounts; ``edges`` holds bit offsets, box b = bits
    edges[b]..edges[b+1]-1.  Returns shape (n_states, n_boxes)."""
    states = np.asarray(states, dtype=np.int64)
    n_boxes = len(edges) - 1
    out = np.empty((states.shape[0], n_boxes), dtype=np.int64)
    for b in range(n_boxes):
        width = int(edges[b + 1] - edges[b])
        mask = ((np.int64(1) << width) - np.int64(1)) << np.int64(edges[b])
        out[:, b] = popcount_numpy(states & mask)
    return out


def fill_hamiltonian_numpy(states: np.ndarray, k: int, l: int, t: float,
                           V: float, t_prime: float, V_prime: float) -> np.ndarray:
    """Dense chain Hamiltonian on an ascending fixed-N bitstring basis.

    Terms for every i with both endpoints in [k, l] (1-based sites):
    -t (hop i <-> i+1), V n_i n_{i+1}, -t' (hop i <-> i+2), V' n_i n_{i+2}.
    Hop sign = parity of occupied sites strictly between the endpoints
    (ascending-order creation convention); nearest-neighbor hops are
    therefore always +1, next-nearest pick up (-1)^{n_middle}.
    """
    states = np.asarray(states, dtype=np.int64)
    n = states.shape[0]
    H = np.zeros((n, n))
    diag = np.zeros(n)
    cols = np.arange(n)
    one = np.int64(1)
    for i in range(k, l):  # NN pairs (i, i+1)
        lo = one << (i - 1)
        hi = one << i
        occ_lo = (states & lo) != 0
        occ_hi = (states & hi) != 0
        diag[occ_lo & occ_hi] += V
        if t != 0.0:
            hop = occ_lo ^ occ_hi
            targets = states[hop] ^ (lo | hi)
            rows = np.searchsorted(states, targets)
            H[rows, cols[hop]] += -t
    for i in range(k, l - 1):  # NNN pairs (i, i+2)
        lo = one << (i - 1)
        mid = one << i
        hi = one << (i + 1)
        occ_lo = (states & lo) != 0
        occ_hi = (states & hi) != 0
        diag[occ_lo & occ_hi] += V_prime
        if t_prime != 0.0:
            hop = occ_lo ^ occ_hi
            sign = 1.0 - 2.0 * ((states[hop] & mid) != 0)
            targets = states[hop] ^ (lo | hi)
            rows = np.searchsorted(states, targets)
            H[rows, cols[hop]] += -t_prime * sign
    H[cols, cols] += diag
    return H


# ---------------------------------------------------------------------------
# numba implementations (compiled lazily on first call)
# ---------------------------------------------------------------------------

if HAVE_NUMBA:

    @_njit(cache=True)
    def popcount_numba(v):  # pragma: no cover - exercised via dispatch tests
        n = v.shape[0]
        out = np.empty(n, dtype=np.int64)
        for i in range(n):
            x = v[i]
            c = 0
            while x:
                x &= x - 1
                c += 1
            out[i] = c
        return out

    @_njit(cache=True)
    def enumerate_states_numba(L, N):
        if N == 0:
            out = np.zeros(1, dtype=np.int64)
            return out
        count = 1
        for i in range(N):  # binomial(L, N)
            count = count * (L - i) // (i + 1)
        out = np.empty(count, dtype=np.int64)
        v = np.int64((1 << N) - 1)
        limit = np.int64(1) << L
        idx = 0
        while v < limit:
            out[idx] = v
            idx += 1
            c = v & (-v)  # Gosper's hack: next same-popcount integer
            r = v + c
            v = (((r ^ v) >> 2) // c) | r
        return out

    @_njit(cache=True)
    def signature_codes_numba(states, edges):
        n = states.shape[0]
        n_boxes = edges.shape[0] - 1
        out = np.empty((n, n_boxes), dtype=np.int64)
        for j in range(n):
            s = states[j]
            for b in range(n_boxes):
                c = 0
                for bit in range(edges[b], edges[b + 1]):
                    if (s >> bit) & 1:
                        c += 1
                out[j, b] = c
        return out

    @_njit(cache=True)
    def _bisect(states, target):
        lo = 0
        hi = states.shape[0]
        while lo < hi:
            m = (lo + hi) >> 1
            if states[m] < target:
                lo = m + 1
            else:
                hi = m
        return lo

    @_njit(cache=True)
    def _fill_hamiltonian_loop(states, k, l, t, V, t_prime, V_prime, H):
        n = states.shape[0]
        one = np.int64(1)
        for col in range(n):
            s = states[col]
            diag = 0.0
            for i in range(k, l):
                lo = one << (i - 1)
                hi = one << i
                occ_lo = (s & lo) != 0
                occ_hi = (s & hi) != 0
                if occ_lo and occ_hi:
                    diag += V
                elif t != 0.0 and (occ_lo != occ_hi):
                    # H is symmetric and each off-diagonal entry comes from
                    # exactly one bond, so storing the mirror element keeps
                    # the writes row-major contiguous.
                    row = _bisect(states, s ^ (lo | hi))
                    H[col, row] += -t
            for i in range(k, l - 1):
                lo = one << (i - 1)
                mid = one << i
                hi = one << (i + 1)
                occ_lo = (s & lo) != 0
                occ_hi = (s & hi) != 0
                if occ_lo and occ_hi:
                    diag += V_prime
                elif t_prime != 0.0 and (occ_lo != occ_hi):
                    row = _bisect(states, s ^ (lo | hi))
                    if s & mid:  # same middle occupancy seen from either end
                        H[col, row] += t_prime
                    else:
                        H[col, row] += -t_prime
            H[col, col] += diag
        return H

    def fill_hamiltonian_numba(states, k, l, t, V, t_prime, V_prime):
        # Allocate here: numpy's zeros is calloc-backed (lazily zeroed pages)
        # while numba's does an explicit memset, which dominates the runtime
        # for dense matrices of this size.
        n = states.shape[0]
        H = np.zeros((n, n))
        _fill_hamiltonian_loop(states, k, l, t, V, t_prime, V_prime, H)
        return H

    popcount = popcount_numba
    enumerate_states = enumerate_states_numba
    signature_codes = signature_codes_numba
    fill_hamiltonian = fill_hamiltonian_numba
else:
    popcount_numba = None
    enumerate_states_numba = None
    signature_codes_numba = None
    fill_hamiltonian_numba = None

    popcount = popcount_numpy
    enumerate_states = enumerate_states_numpy
    signature_codes = signature_codes_numpy
    fill_hamiltonian = fill_hamiltonian_numpy
