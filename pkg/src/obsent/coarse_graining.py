"""Projector-set algebra on a finite Hilbert space.

A coarse-graining is a complete family of mutually orthogonal projectors
summing to the identity.  Every family used here is diagonal in *some*
orthonormal frame, so the representation is (frame, partition of frame
columns, labels): O(dim^2) storage, integer volumes, and probabilities via
one projection per frame instead of per projector.  Dense projector
matrices are materialized only where frames genuinely differ (commutation
tests, joints, literal cross-checks).

Multi-index tables follow the sequential-measurement rule

    p_{i1..in} = tr[P_in ... P_i1 rho P_i1 ... P_in]
    V_{i1..in} = tr[P_in ... P_i1 ... P_in]

with V reduced to ||P_in ... P_i2 X||_F^2 for an orthonormal column basis X
of P_i1 (cyclicity + idempotence), so probabilities and volumes share one
projected-bundle evaluator.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import DomainError, NumericError
from .fock_basis import (
    BoxPartition,
    FockBasis,
    Signature,
    all_signatures,
    cached_basis,
    merge_local_states,
)
from .operators import ChainParams, Operator, QuantumState, build_chain_hamiltonian
from .spectra import Spectrum, cluster_degenerate, eigendecompose, fix_phases

#: Probabilities at or below this are treated as exact zeros (0 ln 0 := 0).
P_FLOOR = 1e-14
#: Volumes below this with negligible probability are pruned from tables.
V_FLOOR = 1e-12

_RELATION_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class CoarseGraining:
    """Orthonormal frame + partition of its columns into macrostates.

    ``frame is None`` means the computational (Fock) frame.  ``groups`` are
    disjoint column-index arrays covering 0..dim-1; ``labels`` carry one
    sortable, human-meaningful label per group (signature, energy, energy
    tuple, bin index, ...), stored in ascending label order.
    """

    dim: int
    frame: np.ndarray | None
    groups: tuple
    labels: tuple

    def __post_init__(self):
        if self.frame is not None and self.frame.shape != (self.dim, self.dim):
            raise DomainError(
                f"frame shape {self.frame.shape} does not match dim {self.dim}"
            )
        if len(self.groups) != len(self.labels):
            raise DomainError("one label per group required")
        concat = np.concatenate([np.asarray(g) for g in self.groups]) if self.groups else np.array([])
        if concat.size != self.dim or not np.array_equal(np.sort(concat), np.arange(self.dim)):
            raise DomainError("groups must disjointly cover all frame columns")
        if any(len(g) == 0 for g in self.groups):
            raise DomainError("empty macrostate group")

    @property
    def num_groups(self) -> int:
        return len(self.groups)

    @property
    def volumes(self) -> np.ndarray:
        """tr P_i per group (the macrostate dimensions), exact integers."""
        return np.asarray([len(g) for g in self.groups], dtype=np.int64)

    @property
    def is_identity_frame(self) -> bool:
        return self.frame is None

    @property
    def is_trivial(self) -> bool:
        """Single macrostate: the projector is exactly the identity."""
        return len(self.groups) == 1

    def column_basis(self, i: int) -> np.ndarray:
        """Orthonormal columns spanning macrostate i (dense)."""
        g = np.asarray(self.groups[i])
        if self.frame is None:
            B = np.zeros((self.dim, g.size))
            B[g, np.arange(g.size)] = 1.0
            return B
        return self.frame[:, g]

    def projector_matrix(self, i: int) -> np.ndarray:
        B = self.column_basis(i)
        return B @ B.conj().T

    def __repr__(self) -> str:
        kind = "identity" if self.frame is None else "frame"
        return f"CoarseGraining(dim={self.dim}, groups={self.num_groups}, {kind})"


def _sorted_cg(dim, frame, groups, labels) -> CoarseGraining:
    order = sorted(range(len(labels)), key=lambda i: labels[i])
    groups = tuple(np.asarray(groups[i], dtype=np.int64) for i in order)
    labels = tuple(labels[i] for i in order)
    return CoarseGraining(dim=dim, frame=frame, groups=groups, labels=labels)


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------


def trivial(dim: int) -> CoarseGraining:
    """The roughest coarse-graining: one macrostate, the whole space."""
    return CoarseGraining(dim=dim, frame=None,
                          groups=(np.arange(dim, dtype=np.int64),), labels=(0,))


@lru_cache(maxsize=32)
def from_observable(spec: Spectrum, degeneracy_tol: float | None = None) -> CoarseGraining:
    """Eigenprojectors of an observable, degenerate eigenvalues grouped."""
    tol = spec.degeneracy_tol() if degeneracy_tol is None else degeneracy_tol
    clusters = cluster_degenerate(spec.eigenvalues, tol)
    groups = tuple(np.asarray(c, dtype=np.int64) for c in clusters)
    labels = tuple(float(spec.eigenvalues[c].mean()) for c in clusters)
    return CoarseGraining(dim=spec.dim, frame=spec.eigenvectors,
                          groups=groups, labels=labels)


@lru_cache(maxsize=32)
def positional(basis: FockBasis, part: BoxPartition) -> CoarseGraining:
    """Macrostates = basis states sharing a per-box particle signature."""
    codes = all_signatures(basis, part)
    uniq, inverse = np.unique(codes, axis=0, return_inverse=True)
    groups = tuple(np.flatnonzero(inverse == i).astype(np.int64)
                   for i in range(uniq.shape[0]))
    labels = tuple(Signature(tuple(int(x) for x in row)) for row in uniq)
    # np.unique sorts rows lexicographically, which is the label order
    return CoarseGraining(dim=basis.dim, frame=None, groups=groups, labels=labels)


@lru_cache(maxsize=32)
def energy_binned(spec: Spectrum, M: int) -> CoarseGraining:
    """M uniform half-open energy bins (top edge closed), empty bins dropped.

    Once M reaches the spectrum size the uniform grid can no longer be
    trusted to isolate levels (clustered eigenvalues may still share a
    bin), so the binning saturates: each degeneracy cluster becomes its
    own group, which is the fully-resolved limit the bin count is heading
    toward.
    """
    if M < 1:
        raise DomainError(f"need at least one bin, got M={M}")
    E = spec.eigenvalues
    if M >= spec.dim:
        clusters = cluster_degenerate(E, spec.degeneracy_tol())
        groups = tuple(np.asarray(c, dtype=np.int64) for c in clusters)
        labels = tuple(range(len(clusters)))
        return CoarseGraining(dim=spec.dim, frame=spec.eigenvectors,
                              groups=groups, labels=labels)
    lo, hi = float(E[0]), float(E[-1])
    width = (hi - lo) / M
    if width <= 0.0:
        bins = np.zeros(E.size, dtype=np.int64)
    else:
        bins = np.minimum(((E - lo) / width).astype(np.int64), M - 1)
    present = np.unique(bins)
    groups = tuple(np.flatnonzero(bins == b).astype(np.int64) for b in present)
    labels = tuple(int(b) for b in present)
    return CoarseGraining(dim=spec.dim, frame=spec.eigenvectors,
                          groups=groups, labels=labels)


@dataclass(frozen=True, eq=False)
class BlockSpectra:
    """Sector-resolved spectra of one contiguous block's Hamiltonian.

    ``bases[n]`` / ``spectra[n]`` cover the n-particle sector of the block
    (n = 0..n_max) with the block re-based to sites 1..width.
    """

    first: int
    last: int
    bases: tuple
    spectra: tuple

    @property
    def width(self) -> int:
        return self.last - self.first + 1

    @property
    def n_max(self) -> int:
        return len(self.spectra) - 1


@lru_cache(maxsize=16)
def block_sector_spectra(first: int, last: int, params: ChainParams,
                         max_particles: int) -> BlockSpectra:
    """Diagonalize one block's Hamiltonian in every feasible particle sector."""
    if last < first:
        raise DomainError(f"bad block range {first}..{last}")
    width = last - first + 1
    n_max = min(width, max_particles)
    bases, specs = [], []
    for n in range(n_max + 1):
        b = cached_basis(width, n)
        if width >= 2:
            H = build_chain_hamiltonian(b, 1, width, params)
        else:
            H = Operator(np.zeros((b.dim, b.dim)))
        specs.append(eigendecompose(H))
        bases.append(b)
    return BlockSpectra(first=first, last=last, bases=tuple(bases), spectra=tuple(specs))


def blocks_from_cuts(L: int, cuts: Sequence[int]) -> tuple:
    """Turn ascending cut sites into block ranges; cut c ends a block at c."""
    cuts = list(cuts)
    if any(not 1 <= c < L for c in cuts) or sorted(set(cuts)) != cuts:
        raise DomainError(f"cuts must be strictly ascending in 1..{L - 1}, got {cuts}")
    edges = [0] + cuts + [L]
    return tuple((edges[i] + 1, edges[i + 1]) for i in range(len(edges) - 1))


def block_energy_clusters(blk: BlockSpectra,
                          degeneracy_tol: float | None = None) -> tuple:
    """Cluster one block's energies *across* its particle sectors.

    A block eigenprojector spans every sector sharing an energy level, so
    sector boundaries must not split a cluster.  Returns (lookup, sizes):
    lookup maps (sector n, local index) to the cluster's representative
    energy, sizes maps each representative to its multiplicity.
    """
    entries = []  # (energy, n, idx)
    for n, spec in enumerate(blk.spectra):
        for idx, E in enumerate(spec.eigenvalues):
            entries.append((float(E), n, idx))
    entries.sort()
    energies = np.asarray([e[0] for e in entries])
    spread = float(energies[-1] - energies[0]) if energies.size > 1 else 0.0
    tol = (max(1e-9 * spread, 1e-12) if degeneracy_tol is None else degeneracy_tol)
    lookup, sizes = {}, {}
    for cluster in cluster_degenerate(energies, tol):
        rep = float(energies[cluster].mean())
        sizes[rep] = len(cluster)
        for pos in cluster:
            _, n, idx = entries[pos]
            lookup[(n, idx)] = rep
    return lookup, sizes


def factorized(block_specs: Sequence[BlockSpectra], full: FockBasis,
               degeneracy_tol: float | None = None) -> CoarseGraining:
    """Tensor products of block eigenprojectors over all particle splittings.

    Frame columns are merged products of local eigenvectors; groups collect
    columns whose per-block representative energies agree.
    """
    blocks = list(block_specs)
    if not blocks:
        raise DomainError("need at least one block")
    expect = 1
    for blk in blocks:
        if blk.first != expect:
            raise DomainError("blocks must tile the lattice contiguously")
        expect = blk.last + 1
    if expect != full.sites + 1:
        raise DomainError(
            f"blocks cover sites 1..{expect - 1}, basis has {full.sites}"
        )
    N = full.particles
    rep_energy = [block_energy_clusters(blk, degeneracy_tol)[0] for blk in blocks]

    # enumerate particle splittings (n_1..n_m) summing to N
    per_block_ns = [range(blk.n_max + 1) for blk in blocks]
    combos = [c for c in itertools.product(*per_block_ns) if sum(c) == N]
    if not combos:
        raise DomainError("no particle splitting matches the total particle number")

    frame = np.zeros((full.dim, full.dim))
    col_labels = []
    offset = 0
    for combo in combos:
        # fold blocks left to right: columns = products of local eigenvectors
        b_acc = blocks[0].bases[combo[0]]
        cols = blocks[0].spectra[combo[0]].eigenvectors
        for kblk in range(1, len(blocks)):
            b_r = blocks[kblk].bases[combo[kblk]]
            u_r = blocks[kblk].spectra[combo[kblk]].eigenvectors
            sites_acc = b_acc.sites + b_r.sites
            n_acc = b_acc.particles + b_r.particles
            b_next = full if kblk == len(blocks) - 1 else cached_basis(sites_acc, n_acc)
            idx = merge_local_states(b_acc, b_r, b_next)
            prod = np.einsum("ia,jb->ijab", cols, u_r)
            merged = np.zeros((b_next.dim, cols.shape[1] * u_r.shape[1]))
            merged[idx.ravel()] = prod.reshape(idx.size, -1)
            b_acc, cols = b_next, merged
        ncols = cols.shape[1]
        frame[:, offset:offset + ncols] = cols
        # label of column (c_1..c_m) = per-block representative energies
        local_dims = [blocks[kb].spectra[combo[kb]].eigenvalues.size
                      for kb in range(len(blocks))]
        for flat, choice in enumerate(itertools.product(*[range(d) for d in local_dims])):
            label = tuple(rep_energy[kb][(combo[kb], choice[kb])]
                          for kb in range(len(blocks)))
            col_labels.append((label, offset + flat))
        offset += ncols
    if offset != full.dim:
        raise NumericError(
            f"factorized frame has {offset} columns for dim {full.dim}"
        )

    grouped = {}
    for label, col in col_labels:
        grouped.setdefault(label, []).append(col)
    labels_sorted = sorted(grouped)
    perm = np.asarray([c for lab in labels_sorted for c in grouped[lab]], dtype=np.int64)
    frame = frame[:, perm]
    groups, start = [], 0
    for lab in labels_sorted:
        size = len(grouped[lab])
        groups.append(np.arange(start, start + size, dtype=np.int64))
        start += size
    return CoarseGraining(dim=full.dim, frame=frame, groups=tuple(groups),
                          labels=tuple(labels_sorted))


@lru_cache(maxsize=8)
def factorized_blocks_cg(basis: FockBasis, cuts: tuple, params: ChainParams,
                         degeneracy_tol: float | None = None) -> CoarseGraining:
    """Convenience: factorized coarse-graining from cut sites (cached)."""
    ranges = blocks_from_cuts(basis.sites, list(cuts))
    blocks = tuple(block_sector_spectra(a, b, params, basis.particles)
                   for a, b in ranges)
    return factorized(blocks, basis, degeneracy_tol)


# ---------------------------------------------------------------------------
# relations
# ---------------------------------------------------------------------------


def _same_frame(c1: CoarseGraining, c2: CoarseGraining) -> bool:
    return (c1.frame is None and c2.frame is None) or (c1.frame is c2.frame)


def _check_dims(c1: CoarseGraining, c2: CoarseGraining) -> None:
    if c1.dim != c2.dim:
        raise DomainError(f"dimension mismatch: {c1.dim} vs {c2.dim}")


def _cross_gram(c1: CoarseGraining, c2: CoarseGraining) -> np.ndarray:
    """F1^H F2 with identity-frame shortcuts."""
    if c1.frame is None and c2.frame is None:
        return np.eye(c1.dim)
    if c1.frame is None:
        return c2.frame
    if c2.frame is None:
        return c1.frame.conj().T
    return c1.frame.conj().T @ c2.frame


def is_finer(c1: CoarseGraining, c2: CoarseGraining, tol: float = _RELATION_TOL) -> bool:
    """True when every projector of c1 is a sum of projectors of c2.

    In words: c2 refines c1 (c2 is the finer family).  Checked blockwise on
    the cross-Gram matrix: for each pair, P1 P2 must be 0 or P2 within
    `tol` in operator norm.
    """
    _check_dims(c1, c2)
    if _same_frame(c1, c2):
        owner = np.empty(c1.dim, dtype=np.int64)
        for gi, g in enumerate(c1.groups):
            owner[g] = gi
        return all(np.unique(owner[g]).size == 1 for g in c2.groups)
    G = _cross_gram(c1, c2)
    for g1 in c1.groups:
        for g2 in c2.groups:
            block = G[np.ix_(g1, g2)]
            s = np.linalg.svd(block, compute_uv=False)
            zero_err = float(s.max(initial=0.0))
            if zero_err < tol:
                continue
            if len(g1) >= len(g2):
                contain_err = float(np.sqrt(max(0.0, 1.0 - float(s.min()) ** 2)))
                if contain_err < tol:
                    continue
            return False
    return True


def commutes(c1: CoarseGraining, c2: CoarseGraining, tol: float = _RELATION_TOL) -> bool:
    """max over pairs of the commutator's largest absolute entry < tol.

    Materializes P1 P2 per pair when frames differ; intended for modest
    dimensions (the construction paths never need it on large spaces).
    """
    _check_dims(c1, c2)
    if _same_frame(c1, c2):
        return True
    G = _cross_gram(c1, c2)
    for i1 in range(c1.num_groups):
        B1 = c1.column_basis(i1)
        for i2 in range(c2.num_groups):
            B2 = c2.column_basis(i2)
            M = B1 @ (G[np.ix_(c1.groups[i1], c2.groups[i2])] @ B2.conj().T)
            if np.abs(M - M.conj().T).max() > tol:
                return False
    return True


def joint(c1: CoarseGraining, c2: CoarseGraining, tol: float = _RELATION_TOL) -> CoarseGraining:
    """The common refinement {P1 P2} \\ {0} of two commuting coarse-grainings."""
    _check_dims(c1, c2)
    if not commutes(c1, c2, tol):
        raise DomainError("joint coarse-graining requires commuting inputs")
    if _same_frame(c1, c2):
        groups, labels = [], []
        for i1, g1 in enumerate(c1.groups):
            for i2, g2 in enumerate(c2.groups):
                inter = np.intersect1d(g1, g2)
                if inter.size:
                    groups.append(inter)
                    labels.append((c1.labels[i1], c2.labels[i2]))
        return _sorted_cg(c1.dim, c1.frame, groups, labels)

    cols, groups, labels = [], [], []
    start = 0
    for i1 in range(c1.num_groups):
        P1 = c1.projector_matrix(i1)
        for i2 in range(c2.num_groups):
            P2 = c2.projector_matrix(i2)
            M = P1 @ P2
            rank = int(round(float(np.trace(M).real)))
            if rank == 0:
                continue
            lam, vecs = np.linalg.eigh(0.5 * (M + M.conj().T))
            sel = np.argsort(lam)[::-1][:rank]
            if lam[sel].min() < 1.0 - 100 * tol:
                raise NumericError("joint projector eigenvalues not near 1")
            cols.append(fix_phases(vecs[:, np.sort(sel)]))
            groups.append(np.arange(start, start + rank, dtype=np.int64))
            labels.append((c1.labels[i1], c2.labels[i2]))
            start += rank
    if start != c1.dim:
        raise NumericError(f"joint produced {start} columns for dim {c1.dim}")
    frame = np.hstack(cols)
    err = np.abs(frame.conj().T @ frame - np.eye(c1.dim)).max()
    if err > 1e-8:
        raise NumericError(f"joint frame deviates from unitary by {err:.2e}")
    order = sorted(range(len(labels)), key=lambda i: labels[i])
    perm = np.concatenate([groups[i] for i in order])
    frame = frame[:, perm]
    new_groups, pos = [], 0
    for i in order:
        size = len(groups[i])
        new_groups.append(np.arange(pos, pos + size, dtype=np.int64))
        pos += size
    return CoarseGraining(dim=c1.dim, frame=frame, groups=tuple(new_groups),
                          labels=tuple(labels[i] for i in order))


def finer_set(c: CoarseGraining, chain: Sequence[CoarseGraining],
              tol: float = _RELATION_TOL) -> bool:
    """Ordered-chain refinement: does measuring the chain subsume measuring c?

    True when every nonzero product P_in ... P_i1 built from the chain
    satisfies (P_in ... P_i1) P_j = P_in ... P_i1 for some projector P_j of
    c.  Materializes dense products; intended for small dimensions.  For a
    chain of one this coincides with is_finer(c, chain[0]).
    """
    chain = tuple(chain)
    if not chain:
        raise DomainError("empty coarse-graining chain")
    for cc in chain:
        _check_dims(c, cc)
    projs = [c.projector_matrix(j) for j in range(c.num_groups)]

    def subsumed(level: int, M: np.ndarray) -> bool:
        if np.abs(M).max() <= tol:
            return True
        if level == len(chain):
            return any(np.abs(M @ P - M).max() < tol for P in projs)
        ck = chain[level]
        return all(subsumed(level + 1, ck.projector_matrix(i) @ M)
                   for i in range(ck.num_groups))

    first = chain[0]
    return all(subsumed(1, first.projector_matrix(i))
               for i in range(first.num_groups))


# ---------------------------------------------------------------------------
# macrostate tables
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class MacrostateTable:
    """(probability, volume) per multi-index, label-sorted.

    Single coarse-grainings keep every macrostate (volumes are exact
    integers summing to dim); ordered chains keep the probability support
    (p > p_floor), with volumes evaluated for exactly those entries.
    """

    order: int
    labels: tuple          # tuples of per-level labels
    p: np.ndarray
    volumes: np.ndarray

    def __post_init__(self):
        total = float(self.p.sum())
        if abs(total - 1.0) > 1e-9:
            raise NumericError(f"macrostate probabilities sum to {total!r}")
        if self.order >= 2 and self.volumes.size and self.volumes.min() <= 0.0:
            raise NumericError("non-positive volume stored in multi-index table")

    def as_dict(self) -> dict:
        return {lab: (float(pp), float(vv))
                for lab, pp, vv in zip(self.labels, self.p, self.volumes)}


def _group_weights(bundle: np.ndarray, c: CoarseGraining) -> np.ndarray:
    """||P_i bundle||_F^2 for every group i (bundle columns = factor)."""
    if c.is_trivial:
        return np.asarray([float(np.sum(np.abs(bundle) ** 2))])
    coeffs = bundle if c.frame is None else c.frame.conj().T @ bundle
    row_w = np.sum(np.abs(coeffs) ** 2, axis=1)
    return np.asarray([float(row_w[g].sum()) for g in c.groups])


def _project_onto_group(bundle: np.ndarray, c: CoarseGraining, gi: int) -> np.ndarray:
    if c.is_trivial:
        return bundle
    g = c.groups[gi]
    if c.frame is None:
        out = np.zeros_like(bundle)
        out[g] = bundle[g]
        return out
    F = c.frame[:, g]
    return F @ (F.conj().T @ bundle)


def _descend(bundle: np.ndarray, chain: Sequence[CoarseGraining],
             floor: float) -> dict:
    """Frobenius weights of all surviving projection paths through `chain`.

    Returns {(i1..ik): weight}; branches whose running weight drops to
    `floor` or below are pruned, which is safe because projections never
    increase the norm.
    """
    frontier = [((), bundle)]
    out = {}
    for level, c in enumerate(chain):
        last = level == len(chain) - 1
        nxt = []
        for midx, B in frontier:
            w = _group_weights(B, c)
            for gi in range(c.num_groups):
                if w[gi] <= floor:
                    continue
                key = midx + (gi,)
                if last:
                    out[key] = float(w[gi])
                else:
                    nxt.append((key, _project_onto_group(B, c, gi)))
        frontier = nxt
    return out


@lru_cache(maxsize=32)
def _pair_volumes(c1: CoarseGraining, c2: CoarseGraining) -> np.ndarray:
    """V_{i1,i2} = tr[P_{i1} P_{i2}] for all pairs (blockwise Gram norms)."""
    if c1.is_trivial:
        return np.broadcast_to(c2.volumes.astype(float), (1, c2.num_groups)).copy()
    if c2.is_trivial:
        return c1.volumes.astype(float)[:, None].copy()
    if c1.frame is None and c2.frame is None:
        V = np.empty((c1.num_groups, c2.num_groups))
        member = np.empty(c1.dim, dtype=np.int64)
        for gi, g in enumerate(c2.groups):
            member[g] = gi
        for i1, g1 in enumerate(c1.groups):
            counts = np.bincount(member[g1], minlength=c2.num_groups)
            V[i1] = counts
        return V
    A = np.abs(_cross_gram(c1, c2)) ** 2
    row_perm = np.concatenate(c1.groups)
    row_starts = np.cumsum([0] + [len(g) for g in c1.groups[:-1]])
    col_perm = np.concatenate(c2.groups)
    col_starts = np.cumsum([0] + [len(g) for g in c2.groups[:-1]])
    B = np.add.reduceat(A[row_perm][:, col_perm], row_starts, axis=0)
    return np.add.reduceat(B, col_starts, axis=1)


def macrostate_table(s: QuantumState, chain: Sequence[CoarseGraining],
                     p_floor: float = P_FLOOR,
                     v_floor: float = V_FLOOR) -> MacrostateTable:
    """Sequential-measurement (p, V) table for an ordered chain.

    Order matters for non-commuting chains.  Volumes: exact group sizes for
    a single coarse-graining; the pairwise Gram formula for chains of two;
    a projected-bundle evaluation per stored entry beyond that.
    """
    chain = tuple(chain)
    if not chain:
        raise DomainError("empty coarse-graining chain")
    for c in chain:
        if c.dim != s.dim:
            raise DomainError(f"state dim {s.dim} != coarse-graining dim {c.dim}")

    if len(chain) == 1:
        c = chain[0]
        p = _group_weights(s.factorized(), c)
        p = np.clip(p, 0.0, None)
        labels = tuple((lab,) for lab in c.labels)
        return MacrostateTable(order=1, labels=labels, p=p,
                               volumes=c.volumes.astype(float))

    weights = _descend(s.factorized(), chain, p_floor)
    keys = sorted(weights, key=lambda k: tuple(chain[lvl].labels[gi]
                                               for lvl, gi in enumerate(k)))
    if len(chain) == 2:
        Vtab = _pair_volumes(chain[0], chain[1])
        vols = np.asarray([Vtab[k] for k in keys])
    else:
        # V_{i1..in} = ||P_in ... P_i2 X||_F^2, X = column basis of P_i1.
        # Floor at p_floor so every stored probability keeps its volume
        # (p <= V, so a surviving p entry cannot lose its V branch).
        vols = np.empty(len(keys))
        for j, k in enumerate(keys):
            rest = _descend(chain[0].column_basis(k[0]), chain[1:], p_floor)
            vols[j] = rest.get(k[1:], 0.0)
        if vols.size and vols.min() <= 0.0:
            raise NumericError("volume evaluation lost a stored entry")
    labels = tuple(tuple(chain[lvl].labels[gi] for lvl, gi in enumerate(k))
                   for k in keys)
    p = np.asarray([weights[k] for k in keys])
    return MacrostateTable(order=len(chain), labels=labels, p=p, volumes=vols)
