"""Chain Hamiltonians, observables, states, and site-bipartition traces.

The Hamiltonian restricted to sites [k, l] carries, for every i with both
endpoints in range,

    -t  (hop i <-> i+1)  +  V  n_i n_{i+1}
    -t' (hop i <-> i+2)  +  V' n_i n_{i+2}

with hard walls (no wraparound; out-of-range terms dropped).  Hop matrix
elements carry the fermionic sign from the ascending-order creation
convention of `fock_basis`: (-1)^(number of occupied sites strictly between
the two endpoints).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import isfinite

import numpy as np

from . import _kernels
from .errors import DomainError, NumericError
from .fock_basis import FockBasis

HERMITICITY_TOL = 1e-12
NORM_TOL = 1e-10


@dataclass(frozen=True)
class ChainParams:
    """Couplings of the fermion chain (energy units hbar = 1)."""

    t: float = 1.0
    V: float = 1.0
    t_prime: float = 0.0
    V_prime: float = 0.0

    def __post_init__(self):
        for name in ("t", "V", "t_prime", "V_prime"):
            if not isfinite(getattr(self, name)):
                raise DomainError(f"non-finite coupling {name}")

    @classmethod
    def integrable(cls, t: float = 1.0, V: float = 1.0) -> "ChainParams":
        """Nearest-neighbor-only chain (solvable limit)."""
        return cls(t=t, V=V, t_prime=0.0, V_prime=0.0)

    @classmethod
    def non_integrable(cls, t: float = 1.0, V: float = 1.0,
                       strength: float = 0.96) -> "ChainParams":
        """Chain with next-nearest-neighbor terms switched on."""
        return cls(t=t, V=V, t_prime=strength, V_prime=strength)


@dataclass(frozen=True, eq=False)
class Operator:
    """Dense Hermitian matrix in the Fock basis."""

    matrix: np.ndarray

    def __post_init__(self):
        m = self.matrix
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DomainError(f"operator matrix must be square, got {m.shape}")
        if np.abs(m - m.conj().T).max() > HERMITICITY_TOL:
            raise DomainError("operator matrix is not Hermitian within 1e-12")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __add__(self, other: "Operator") -> "Operator":
        return Operator(self.matrix + other.matrix)

    def __sub__(self, other: "Operator") -> "Operator":
        return Operator(self.matrix - other.matrix)

    def __mul__(self, scalar: float) -> "Operator":
        return Operator(self.matrix * scalar)

    __rmul__ = __mul__


class QuantumState:
    """Pure state vector or mixed density matrix (trace-normalized).

    Mixed states may be held as a low-rank factor X with rho = X X^H, which
    keeps k-state mixtures cheap on the projection-heavy paths; the dense
    matrix is materialized lazily on first access.
    """

    __slots__ = ("_vector", "_factor", "_matrix")

    def __init__(self):
        raise TypeError("use QuantumState.pure / .mixed / .from_factor")

    # -- constructors -------------------------------------------------------

    @classmethod
    def _blank(cls) -> "QuantumState":
        obj = object.__new__(cls)
        obj._vector = None
        obj._factor = None
        obj._matrix = None
        return obj

    @classmethod
    def pure(cls, vector: np.ndarray) -> "QuantumState":
        v = np.asarray(vector)
        if v.ndim != 1:
            raise DomainError(f"pure state must be a vector, got shape {v.shape}")
        norm = float(np.linalg.norm(v))
        if abs(norm - 1.0) > NORM_TOL:
            raise DomainError(f"pure state norm {norm!r} deviates from 1 beyond 1e-10")
        obj = cls._blank()
        obj._vector = v
        return obj

    @classmethod
    def mixed(cls, matrix: np.ndarray) -> "QuantumState":
        m = np.asarray(matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DomainError(f"density matrix must be square, got {m.shape}")
        if np.abs(m - m.conj().T).max() > NORM_TOL:
            raise DomainError("density matrix is not Hermitian within 1e-10")
        tr = float(np.trace(m).real)
        if abs(tr - 1.0) > NORM_TOL:
            raise DomainError(f"density matrix trace {tr!r} deviates from 1 beyond 1e-10")
        obj = cls._blank()
        obj._matrix = m
        return obj

    @classmethod
    def from_factor(cls, factor: np.ndarray) -> "QuantumState":
        """Mixed state rho = factor @ factor^H (columns may be any rank)."""
        X = np.asarray(factor)
        if X.ndim != 2:
            raise DomainError(f"factor must be 2-D, got shape {X.shape}")
        tr = float(np.sum(np.abs(X) ** 2))
        if abs(tr - 1.0) > NORM_TOL:
            raise DomainError(f"factor trace {tr!r} deviates from 1 beyond 1e-10")
        obj = cls._blank()
        obj._factor = X
        return obj

    # -- views --------------------------------------------------------------

    @property
    def is_pure(self) -> bool:
        return self._vector is not None

    @property
    def dim(self) -> int:
        if self._vector is not None:
            return self._vector.shape[0]
        if self._factor is not None:
            return self._factor.shape[0]
        return self._matrix.shape[0]

    @property
    def vector(self) -> np.ndarray:
        if self._vector is None:
            raise DomainError("not a pure state")
        return self._vector

    @property
    def matrix(self) -> np.ndarray:
        """Dense density matrix (built on demand for pure/factored states)."""
        if self._matrix is None:
            if self._vector is not None:
                v = self._vector
                self._matrix = np.outer(v, v.conj())
            else:
                self._matrix = self._factor @ self._factor.conj().T
        return self._matrix

    def factorized(self) -> np.ndarray:
        """A (dim, rank) matrix X with rho = X X^H.

        Pure states return their vector as a column; dense mixed states are
        factored once through an eigendecomposition (eigenvalues <= 1e-14
        dropped) and the result cached.
        """
        if self._vector is not None:
            return self._vector[:, None]
        if self._factor is None:
            lam, U = np.linalg.eigh(self._matrix)
            if lam.min() < -1e-10:
                raise NumericError(f"density matrix has eigenvalue {lam.min():.3e}")
            keep = lam > 1e-14
            self._factor = U[:, keep] * np.sqrt(lam[keep])
        return self._factor

    def validate(self) -> None:
        """Full (O(dim^3) for mixed) invariant check; raises on violation."""
        if self._vector is not None:
            norm = float(np.linalg.norm(self._vector))
            if abs(norm - 1.0) > NORM_TOL:
                raise NumericError(f"norm drifted to {norm!r}")
            return
        lam = np.linalg.eigvalsh(self.matrix)
        if lam.min() < -1e-10:
            raise NumericError(f"negative eigenvalue {lam.min():.3e}")
        if abs(lam.sum() - 1.0) > NORM_TOL:
            raise NumericError(f"trace drifted to {lam.sum()!r}")


# ---------------------------------------------------------------------------
# operator construction and use
# ---------------------------------------------------------------------------


@lru_cache(maxsize=64)
def build_chain_hamiltonian(basis: FockBasis, k: int, l: int,
                            params: ChainParams) -> Operator:
    """Hamiltonian for fermions moving between sites k and l (inclusive)."""
    if not (1 <= k < l <= basis.sites):
        raise DomainError(
            f"need 1 <= k < l <= L={basis.sites}, got k={k}, l={l}"
        )
    H = _kernels.fill_hamiltonian(basis.states, k, l, params.t, params.V,
                                  params.t_prime, params.V_prime)
    return Operator(H)


def number_operator_diagonals(basis: FockBasis) -> np.ndarray:
    """Occupations n_s per basis state, shape (dim, L); handy for observables."""
    bits = np.arange(basis.sites, dtype=np.int64)
    return ((basis.states[:, None] >> bits[None, :]) & 1).astype(float)


def apply(op: Operator, s: QuantumState) -> np.ndarray:
    """op|psi> for pure input, op @ rho (unnormalized) for mixed input."""
    if op.dim != s.dim:
        raise DomainError(f"dimension mismatch: operator {op.dim}, state {s.dim}")
    if s.is_pure:
        return op.matrix @ s.vector
    return op.matrix @ s.matrix


def expectation(op: Operator, s: QuantumState) -> float:
    """<psi|op|psi> or tr[op rho], imaginary part discarded (must be tiny)."""
    if op.dim != s.dim:
        raise DomainError(f"dimension mismatch: operator {op.dim}, state {s.dim}")
    if s.is_pure:
        val = complex(np.vdot(s.vector, op.matrix @ s.vector))
    else:
        # tr[A rho] = sum_{ijk} A[i,j] X[j,k] conj(X[i,k])
        X = s.factorized()
        val = complex(np.einsum("ij,jk,ik->", op.matrix, X, X.conj(), optimize=True))
    if abs(val.imag) > 1e-8:
        raise NumericError(f"expectation value has imaginary part {val.imag:.3e}")
    return float(val.real)


# ---------------------------------------------------------------------------
# partial traces
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ReducedState:
    """Reduced density matrix on a contiguous site block.

    Indexed by the block's occupation bitstrings (ascending), restricted to
    particle sectors that are feasible given the total N; block-diagonal
    across those sectors (particle-number superselection).
    """

    state: QuantumState
    patterns: np.ndarray        # block bitstrings, ascending
    particle_counts: np.ndarray  # popcount per pattern

    def sector_indices(self, n: int) -> np.ndarray:
        """Positions (within `patterns`) of the n-particle sector."""
        return np.flatnonzero(self.particle_counts == n)


def reduce_to_sites(s: QuantumState, basis: FockBasis, first: int,
                    last: int) -> ReducedState:
    """Trace out everything except sites first..last (1-based inclusive).

    Because complementary occupation patterns fix the block particle number,
    reordering signs cancel pairwise and the reduction is sign-free.
    """
    if not (1 <= first <= last <= basis.sites):
        raise DomainError(
            f"need 1 <= first <= last <= {basis.sites}, got {first}..{last}"
        )
    if s.dim != basis.dim:
        raise DomainError(f"state dim {s.dim} != basis dim {basis.dim}")
    width = last - first + 1
    states = basis.states
    inner = (states >> np.int64(first - 1)) & ((np.int64(1) << width) - 1)
    low = states & ((np.int64(1) << (first - 1)) - 1)
    outer = low | ((states >> np.int64(last)) << np.int64(first - 1))

    patterns, inner_idx = np.unique(inner, return_inverse=True)
    out_codes, outer_idx = np.unique(outer, return_inverse=True)
    n_in, n_out = patterns.shape[0], out_codes.shape[0]

    X = s.factorized()
    r = X.shape[1]
    red = np.zeros((n_in, n_in), dtype=complex)
    # chunk the rank axis so the scatter workspace stays bounded
    chunk = max(1, int(2e7 // max(1, n_out * n_in)))
    for c0 in range(0, r, chunk):
        Xc = X[:, c0:c0 + chunk]
        W = np.zeros((n_out, n_in, Xc.shape[1]), dtype=complex)
        W[outer_idx, inner_idx, :] = Xc
        red += np.einsum("oic,ojc->ij", W, W.conj(), optimize=True)
    red = 0.5 * (red + red.conj().T)
    counts = _kernels.popcount(patterns)
    return ReducedState(state=QuantumState.mixed(red), patterns=patterns,
                        particle_counts=counts)


def partial_trace_left(s: QuantumState, basis: FockBasis, L_left: int) -> ReducedState:
    """Reduced state of the leading L_left sites (right block traced out)."""
    if not (1 <= L_left < basis.sites):
        raise DomainError(f"need 1 <= L_left < L={basis.sites}, got {L_left}")
    return reduce_to_sites(s, basis, 1, L_left)
