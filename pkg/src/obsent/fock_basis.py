"""Fixed-particle-number Fock space of spinless fermions on a 1-D lattice.

Conventions used across the whole package:

* Sites are numbered 1..L.  Bit (s-1) of a basis integer holds the
  occupation of site s, so the *leading* sites are the *low* bits.
* Basis order is ascending bitstring integer value (deterministic, cheap
  inverse lookup).
* A bitstring stands for creation operators applied in ascending site order
  to the vacuum.  With that convention, concatenating a left block with a
  right block introduces no fermionic permutation sign, which is why
  `merge_local_states` and `embed_subsystem_state` are sign-free.  The
  operators module carries the matching hop-sign rule.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb

import numpy as np

from . import _kernels
from .errors import CapacityError, DomainError

#: Dense-eigensolve feasibility guard (configurable per call).
MAX_DIMENSION_DEFAULT = 20_000

#: Hard cap on lattice size; int64 bitstrings and dense matrices beyond this
#: are out of scope.
MAX_SITES = 28


@dataclass(frozen=True, order=True)
class Signature:
    """Per-box particle counts; one positional macrostate label."""

    counts: tuple[int, ...]

    def __post_init__(self):
        if any(c < 0 for c in self.counts):
            raise DomainError(f"negative box count in signature {self.counts}")

    @property
    def total(self) -> int:
        return sum(self.counts)

    def __str__(self) -> str:
        return "[" + ",".join(str(c) for c in self.counts) + "]"


@dataclass(frozen=True)
class BoxPartition:
    """Ordered tiling of sites 1..L into contiguous boxes.

    Boxes are 1-based inclusive (start, stop) ranges; they must be adjacent
    and start at site 1.  Uneven tails are rejected by `uniform` — every
    supported experiment tiles the lattice exactly.
    """

    boxes: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if not self.boxes:
            raise DomainError("empty box partition")
        expect = 1
        for a, b in self.boxes:
            if a != expect or b < a:
                raise DomainError(f"boxes must tile sites contiguously, got {self.boxes}")
            expect = b + 1

    @classmethod
    def uniform(cls, L: int, n_boxes: int) -> "BoxPartition":
        """Split 1..L into `n_boxes` equal boxes; L must divide evenly."""
        if n_boxes < 1 or L < 1:
            raise DomainError(f"need L >= 1 and n_boxes >= 1, got L={L}, n_boxes={n_boxes}")
        if L % n_boxes:
            raise DomainError(f"L={L} not divisible into {n_boxes} equal boxes")
        w = L // n_boxes
        return cls(tuple((1 + i * w, (i + 1) * w) for i in range(n_boxes)))

    @property
    def site_count(self) -> int:
        return self.boxes[-1][1]

    @property
    def num_boxes(self) -> int:
        return len(self.boxes)

    def bit_edges(self) -> np.ndarray:
        """Bit-offset edges for the kernel routines: box b covers bits
        edges[b]..edges[b+1]-1."""
        edges = [a - 1 for a, _ in self.boxes] + [self.boxes[-1][1]]
        return np.asarray(edges, dtype=np.int64)


@dataclass(frozen=True, eq=False)
class FockBasis:
    """Ascending enumeration of all N-particle bitstrings on L sites."""

    sites: int
    particles: int
    states: np.ndarray          # int64, strictly ascending
    index_map: dict             # bitstring -> position in `states`

    @property
    def dim(self) -> int:
        return self.states.shape[0]

    def index_of(self, bits: int) -> int:
        try:
            return self.index_map[int(bits)]
        except KeyError:
            raise DomainError(
                f"bitstring {bits:#x} not in basis (L={self.sites}, N={self.particles})"
            ) from None

    def __repr__(self) -> str:  # dataclass default would dump the array
        return f"FockBasis(L={self.sites}, N={self.particles}, dim={self.dim})"


def build_basis(L: int, N: int, max_dim: int = MAX_DIMENSION_DEFAULT) -> FockBasis:
    """Enumerate the (L choose N)-dimensional N-particle space."""
    if L < 0 or N < 0 or N > L:
        raise DomainError(f"need 0 <= N <= L, got L={L}, N={N}")
    if L > MAX_SITES:
        raise DomainError(f"L={L} exceeds the {MAX_SITES}-site cap")
    dim = comb(L, N)
    if dim > max_dim:
        raise CapacityError(f"dim C({L},{N}) = {dim} exceeds max_dim = {max_dim}")
    states = _kernels.enumerate_states(L, N)
    index_map = {int(s): i for i, s in enumerate(states)}
    return FockBasis(sites=L, particles=N, states=states, index_map=index_map)


@lru_cache(maxsize=64)
def cached_basis(L: int, N: int) -> FockBasis:
    """Shared FockBasis instances so downstream identity-keyed caches hit."""
    return build_basis(L, N)


def signature_of(state: int, part: BoxPartition) -> Signature:
    """Particle count in each box of `part` for one bitstring."""
    state = int(state)
    if state < 0 or state >> part.site_count:
        raise DomainError(f"bitstring {state:#x} does not fit {part.site_count} sites")
    row = _kernels.signature_codes(np.asarray([state], dtype=np.int64), part.bit_edges())[0]
    return Signature(tuple(int(c) for c in row))


def all_signatures(basis: FockBasis, part: BoxPartition) -> np.ndarray:
    """Per-box counts for every basis state, shape (dim, num_boxes)."""
    if part.site_count != basis.sites:
        raise DomainError(
            f"partition covers {part.site_count} sites, basis has {basis.sites}"
        )
    return _kernels.signature_codes(basis.states, part.bit_edges())


def embed_subsystem_state(v: np.ndarray, sub: FockBasis, full: FockBasis) -> np.ndarray:
    """Isometry from the leading-L_sub-sites space into the full space.

    Each sub-basis bitstring maps to the identical full bitstring (the
    trailing sites stay empty); amplitudes are copied, so the norm is
    preserved exactly.
    """
    if sub.particles != full.particles:
        raise DomainError(
            f"particle number mismatch: sub N={sub.particles}, full N={full.particles}"
        )
    if sub.sites > full.sites:
        raise DomainError(f"sub lattice ({sub.sites}) larger than full ({full.sites})")
    v = np.asarray(v)
    if v.shape != (sub.dim,):
        raise DomainError(f"state has shape {v.shape}, expected ({sub.dim},)")
    out = np.zeros(full.dim, dtype=v.dtype)
    positions = np.asarray([full.index_map[int(s)] for s in sub.states])
    out[positions] = v
    return out


def merge_local_states(left: FockBasis, right: FockBasis, full: FockBasis) -> np.ndarray:
    """(left index, right index) -> full index for block concatenation.

    The full bitstring is ``left | (right << L_left)``: the left block
    occupies the low bits (leading sites).  No permutation sign is needed
    under the ascending-order creation convention.
    """
    if left.sites + right.sites != full.sites:
        raise DomainError(
            f"site mismatch: {left.sites}+{right.sites} != {full.sites}"
        )
    if left.particles + right.particles != full.particles:
        raise DomainError(
            f"particle mismatch: {left.particles}+{right.particles} != {full.particles}"
        )
    shift = np.int64(left.sites)
    combined = left.states[:, None] | (right.states[None, :] << shift)
    idx = np.searchsorted(full.states, combined)
    if not np.array_equal(full.states[idx], combined):
        raise DomainError("merged bitstrings missing from the full basis")
    return idx.astype(np.int64)
