"""Eigenbasis time evolution, quench protocol, and initial-state builders.

Evolution is exact: states are expressed once in the Hamiltonian eigenbasis
and propagated by phase rotation e^{-iEt} (hbar = 1).  Mixed states evolve
through their low-rank factor, so a rank-r state costs O(dim^2 r) per time
point with no rebuild of the density matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError
from .fock_basis import FockBasis, cached_basis, embed_subsystem_state
from .operators import ChainParams, QuantumState, build_chain_hamiltonian
from .spectra import Spectrum, eigendecompose, thermal_ensemble


@dataclass(frozen=True, eq=False)
class EvolutionContext:
    """A state frozen in the eigenbasis of the Hamiltonian evolving it."""

    spectrum: Spectrum
    coeffs: np.ndarray   # (dim,) for pure states, (dim, r) factor otherwise
    pure: bool

    @classmethod
    def prepare(cls, spec: Spectrum, state: QuantumState) -> "EvolutionContext":
        if state.dim != spec.dim:
            raise DomainError(f"state dim {state.dim} != spectrum dim {spec.dim}")
        U = spec.eigenvectors
        if state.is_pure:
            return cls(spectrum=spec, coeffs=U.conj().T @ state.vector, pure=True)
        return cls(spectrum=spec, coeffs=U.conj().T @ state.factorized(), pure=False)

    def populations(self) -> np.ndarray:
        """|c_E|^2 per eigenvector; conserved under evolve()."""
        if self.pure:
            return np.abs(self.coeffs) ** 2
        return np.sum(np.abs(self.coeffs) ** 2, axis=1)


def evolve(ctx: EvolutionContext, t: float) -> QuantumState:
    phase = np.exp(-1j * ctx.spectrum.eigenvalues * t)
    U = ctx.spectrum.eigenvectors
    if ctx.pure:
        return QuantumState.pure(U @ (phase * ctx.coeffs))
    return QuantumState.from_factor(U @ (phase[:, None] * ctx.coeffs))


def reduced_eigenstate(full: FockBasis, sub_sites: int, params: ChainParams,
                       k: int) -> QuantumState:
    """k-th (1-based, ascending energy) eigenstate of the leading sub-chain.

    The sub-chain keeps the full particle number and sites 1..sub_sites;
    the eigenvector is embedded into the full basis with the right block
    empty.
    """
    if not 1 <= sub_sites <= full.sites:
        raise DomainError(f"sub-chain size {sub_sites} outside 1..{full.sites}")
    sub = cached_basis(sub_sites, full.particles)
    spec = eigendecompose(build_chain_hamiltonian(sub, 1, sub_sites, params))
    if not 1 <= k <= spec.dim:
        raise DomainError(f"eigenstate ordinal {k} outside 1..{spec.dim}")
    return QuantumState.pure(embed_subsystem_state(spec.eigenvectors[:, k - 1],
                                                   sub, full))


def pure_thermal_state(spec: Spectrum, beta: float, seed: int) -> QuantumState:
    """Pure state with exact canonical weights and seeded random phases.

    |c_E|^2 = e^{-beta E}/Z holds exactly; only the phases are random, so
    the energy-diagonal observables match the canonical ensemble by
    construction.
    """
    ens = thermal_ensemble(spec, beta)
    rng = np.random.default_rng(seed)
    phases = np.exp(2j * np.pi * rng.random(spec.dim))
    v = spec.eigenvectors @ (np.sqrt(ens.probabilities) * phases)
    return QuantumState.pure(v / np.linalg.norm(v))


def _window(spec: Spectrum, center_index: int, k: int) -> slice:
    if k < 1:
        raise DomainError(f"window size {k} must be positive")
    lo = center_index - k // 2   # 1-based first index of the window
    if lo < 1 or lo + k - 1 > spec.dim:
        raise DomainError(
            f"window of {k} states around index {center_index} exceeds the "
            f"spectrum (dim {spec.dim})"
        )
    return slice(lo - 1, lo - 1 + k)


def ps_state(spec: Spectrum, center_index: int, k: int, seed: int) -> QuantumState:
    """Superposition of k neighboring eigenstates, amplitudes uniform on the
    complex unit disk, then normalized.  center_index is 1-based."""
    win = _window(spec, center_index, k)
    rng = np.random.default_rng(seed)
    radii = np.sqrt(rng.random(k))
    angles = 2.0 * np.pi * rng.random(k)
    amps = radii * np.exp(1j * angles)
    amps /= np.linalg.norm(amps)
    return QuantumState.pure(spec.eigenvectors[:, win] @ amps)


def microcanonical_mixture(spec: Spectrum, center_index: int, k: int) -> QuantumState:
    """Equal-weight mixture of k neighboring eigenprojectors."""
    win = _window(spec, center_index, k)
    return QuantumState.from_factor(spec.eigenvectors[:, win] / np.sqrt(k))


def quench(pre_state: QuantumState, sub_basis: FockBasis, full_basis: FockBasis,
           params: ChainParams, t_grid: Sequence[float],
           switch_time: float = 0.0) -> list:
    """Hard-wall expansion: evolve on the sub-chain, release at switch_time.

    For t <= switch_time the state evolves under the sub-chain Hamiltonian
    and is embedded for output; afterwards the embedded switch-time state
    evolves under the full Hamiltonian.  Every returned state lives in the
    full basis.
    """
    if pre_state.dim != sub_basis.dim:
        raise DomainError("pre-quench state does not live in the sub-chain basis")
    sub_spec = eigendecompose(
        build_chain_hamiltonian(sub_basis, 1, sub_basis.sites, params))
    full_spec = eigendecompose(
        build_chain_hamiltonian(full_basis, 1, full_basis.sites, params))
    ctx_pre = EvolutionContext.prepare(sub_spec, pre_state)

    def embed(st: QuantumState) -> QuantumState:
        if st.is_pure:
            return QuantumState.pure(
                embed_subsystem_state(st.vector, sub_basis, full_basis))
        X = st.factorized()
        cols = np.stack([embed_subsystem_state(X[:, j], sub_basis, full_basis)
                         for j in range(X.shape[1])], axis=1)
        return QuantumState.from_factor(cols)

    ctx_post = None
    out = []
    for t in t_grid:
        if t <= switch_time:
            out.append(embed(evolve(ctx_pre, float(t))))
        else:
            if ctx_post is None:
                ctx_post = EvolutionContext.prepare(
                    full_spec, embed(evolve(ctx_pre, switch_time)))
            out.append(evolve(ctx_post, float(t) - switch_time))
    return out
