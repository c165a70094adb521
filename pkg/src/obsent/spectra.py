"""Eigendecomposition and spectrum-derived quantities.

Covers: dense Hermitian eigensolve with a deterministic eigenvector phase
convention, canonical ensembles (inverse temperature from a mean-energy
root condition, solved in log space), von Neumann entropy, the
energy-diagonal part of a state, and a Gaussian-kernel density of states
with the microcanonical entropy built on it.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg
from scipy.optimize import brentq
from scipy.special import logsumexp

from .errors import DomainError, NumericError
from .operators import Operator, QuantumState

#: Relative (to spectral range) tolerance for grouping degenerate eigenvalues.
DEGENERACY_REL_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Ascending eigenvalues with orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    source_dim: int

    @property
    def dim(self) -> int:
        return self.source_dim

    def spectral_range(self) -> float:
        return float(self.eigenvalues[-1] - self.eigenvalues[0])

    def degeneracy_tol(self) -> float:
        """Default clustering tolerance: 1e-9 x spectral range (floored)."""
        return max(DEGENERACY_REL_TOL * self.spectral_range(), 1e-14)

    def __repr__(self) -> str:
        return f"Spectrum(dim={self.source_dim})"


def fix_phases(vectors: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Rotate each column so its first nonzero component is positive real.

    Makes eigenvector output reproducible across runs; applied to every
    decomposition in the package.
    """
    V = vectors.copy()
    for j in range(V.shape[1]):
        col = V[:, j]
        nz = np.flatnonzero(np.abs(col) > tol)
        if nz.size == 0:
            continue
        pivot = col[nz[0]]
        V[:, j] = col * (abs(pivot) / pivot)
    return V


@lru_cache(maxsize=6)
def eigendecompose(op: Operator) -> Spectrum:
    """Full dense eigensolve (ascending) with fixed phases.

    Cached on operator identity; `build_chain_hamiltonian` returns cached
    operators, so repeated scenario code reuses one decomposition.
    """
    m = op.matrix
    if np.abs(m - m.conj().T).max() > 1e-12:
        raise DomainError("eigendecompose requires a Hermitian operator")
    try:
        vals, vecs = scipy.linalg.eigh(m)
    except scipy.linalg.LinAlgError as exc:  # pragma: no cover - rare
        raise NumericError(f"eigensolver failed: {exc}") from exc
    vecs = fix_phases(vecs)
    return Spectrum(eigenvalues=vals, eigenvectors=vecs, source_dim=m.shape[0])


def cluster_degenerate(values: np.ndarray, tol: float) -> list[np.ndarray]:
    """Group ascending values into clusters separated by gaps > tol."""
    values = np.asarray(values)
    if values.size == 0:
        return []
    splits = np.flatnonzero(np.diff(values) > tol) + 1
    return np.split(np.arange(values.size), splits)


# ---------------------------------------------------------------------------
# canonical ensemble
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ThermalEnsemble:
    """Boltzmann weights exp(-beta E)/Z over an eigenbasis."""

    beta: float
    log_partition: float
    probabilities: np.ndarray

    def mean_energy(self, eigenvalues: np.ndarray) -> float:
        return float(self.probabilities @ eigenvalues)


def _ensemble_at(eigenvalues: np.ndarray, beta: float) -> ThermalEnsemble:
    logw = -beta * eigenvalues
    logZ = float(logsumexp(logw))
    p = np.exp(logw - logZ)
    p /= p.sum()
    return ThermalEnsemble(beta=float(beta), log_partition=logZ, probabilities=p)


def solve_beta(spec: Spectrum, target_energy: float) -> ThermalEnsemble:
    """Ensemble whose mean energy equals `target_energy`.

    The root condition is solved with a bracketing method on beta; all
    weight evaluations go through log-sum-exp so nothing overflows for
    |beta| x spectral range up to ~700.
    """
    E = spec.eigenvalues
    lo, hi = float(E[0]), float(E[-1])
    if not (lo < target_energy < hi):
        raise DomainError(
            f"target energy {target_energy} outside open spectral interval ({lo}, {hi})"
        )
    rng = hi - lo
    if rng == 0.0:
        raise DomainError("flat spectrum has no solvable mean-energy condition")

    def mean_minus_target(beta: float) -> float:
        logw = -beta * E
        shift = logw.max()
        w = np.exp(logw - shift)
        return float((w @ E) / w.sum()) - target_energy

    beta_cap = 700.0 / rng
    a, b = -1.0 / rng, 1.0 / rng
    fa, fb = mean_minus_target(a), mean_minus_target(b)
    # mean energy decreases with beta: expand until the bracket straddles 0
    while fa < 0.0:
        a *= 2.0
        if abs(a) > beta_cap:
            raise NumericError("target energy too close to the spectral edge")
        fa = mean_minus_target(a)
    while fb > 0.0:
        b *= 2.0
        if b > beta_cap:
            raise NumericError("target energy too close to the spectral edge")
        fb = mean_minus_target(b)
    if fa == 0.0:
        beta = a
    elif fb == 0.0:
        beta = b
    else:
        beta = brentq(mean_minus_target, a, b, xtol=1e-15 * max(1.0, beta_cap),
                      rtol=8.9e-16, maxiter=200)
    ens = _ensemble_at(E, beta)
    if abs(ens.mean_energy(E) - target_energy) > 1e-8 * max(rng, 1.0):
        raise NumericError("inverse-temperature solve did not meet tolerance")
    return ens


def thermal_ensemble(spec: Spectrum, beta: float) -> ThermalEnsemble:
    """Ensemble at a given inverse temperature (no root solve)."""
    return _ensemble_at(spec.eigenvalues, beta)


def thermal_state(spec: Spectrum, ens: ThermalEnsemble) -> QuantumState:
    """Density matrix of the ensemble, held as an eigenvector factor."""
    X = spec.eigenvectors * np.sqrt(ens.probabilities)
    X = X / np.linalg.norm(X)
    return QuantumState.from_factor(X)


def canonical_entropy(ens: ThermalEnsemble) -> float:
    """beta <E> + ln Z, evaluated as -sum p ln p.

    The two forms agree to rounding; the Shannon form avoids the large-beta
    cancellation between beta<E> and ln Z.
    """
    p = ens.probabilities
    nz = p[p > 0.0]
    return float(-np.sum(nz * np.log(nz)))


def von_neumann_entropy(s: QuantumState) -> float:
    """-tr[rho ln rho]; exactly 0.0 for pure input."""
    if s.is_pure:
        return 0.0
    X = s.factorized()
    d, r = X.shape
    if r < d:
        lam = np.linalg.eigvalsh(X.conj().T @ X)
    else:
        lam = np.linalg.eigvalsh(s.matrix)
    lam = lam[lam > 1e-14]
    return float(-np.sum(lam * np.log(lam)))


# ---------------------------------------------------------------------------
# energy-diagonal state
# ---------------------------------------------------------------------------


def diagonal_density_matrix(s: QuantumState, spec: Spectrum,
                            degeneracy_tol: float | None = None) -> QuantumState:
    """Drop energy coherences; average weights over degenerate subspaces."""
    if s.dim != spec.dim:
        raise DomainError(f"state dim {s.dim} != spectrum dim {spec.dim}")
    tol = spec.degeneracy_tol() if degeneracy_tol is None else degeneracy_tol
    U = spec.eigenvectors
    X = s.factorized()
    weights = np.sum(np.abs(U.conj().T @ X) ** 2, axis=1)
    for cluster in cluster_degenerate(spec.eigenvalues, tol):
        if cluster.size > 1:
            weights[cluster] = weights[cluster].mean()
    weights = np.clip(weights, 0.0, None)
    weights /= weights.sum()
    return QuantumState.from_factor(U * np.sqrt(weights))


def energy_populations(s: QuantumState, spec: Spectrum,
                       degeneracy_tol: float | None = None) -> np.ndarray:
    """Total weight per degenerate energy cluster (ascending clusters)."""
    tol = spec.degeneracy_tol() if degeneracy_tol is None else degeneracy_tol
    X = s.factorized()
    w = np.sum(np.abs(spec.eigenvectors.conj().T @ X) ** 2, axis=1)
    return np.asarray([w[c].sum() for c in cluster_degenerate(spec.eigenvalues, tol)])


# ---------------------------------------------------------------------------
# density of states / microcanonical entropy
# ---------------------------------------------------------------------------


def default_kernel_width(spec: Spectrum, E: float, factor: float = 5.0,
                         window: int = 11) -> float:
    """Bandwidth heuristic: `factor` x local mean level spacing.

    The local spacing is read off a `window`-eigenvalue neighborhood of E.
    This is a surfaced knob, not a canonical value; scenario output records
    the width actually used.
    """
    E_sorted = spec.eigenvalues
    n = E_sorted.size
    if n < 2:
        raise DomainError("need at least two eigenvalues for a spacing estimate")
    win = min(max(window, 2), n)
    pos = int(np.searchsorted(E_sorted, E))
    a = min(max(pos - win // 2, 0), n - win)
    local = E_sorted[a:a + win]
    spacing = float(local[-1] - local[0]) / (win - 1)
    if spacing <= 0.0:
        spacing = spec.spectral_range() / (n - 1)
    return factor * spacing


def density_of_states(spec: Spectrum, E, kernel_width: float):
    """Gaussian-kernel estimate of the level density at E (scalar or array)."""
    if kernel_width <= 0.0:
        raise DomainError(f"kernel width must be positive, got {kernel_width}")
    E = np.asarray(E, dtype=float)
    z = (E[..., None] - spec.eigenvalues) / kernel_width
    dens = np.exp(-0.5 * z ** 2).sum(axis=-1) / (kernel_width * np.sqrt(2.0 * np.pi))
    return dens if dens.ndim else float(dens)


def microcanonical_entropy(spec: Spectrum, E: float, N_particles: int,
                           kernel_width: float) -> float:
    """ln(rho(E) dE) with dE = std(eigenvalues)/sqrt(N_particles).

    Evaluated in log space, so deep spectral tails come back strongly
    negative instead of overflowing to -inf through a zero density.
    """
    if N_particles <= 0:
        raise DomainError(f"need a positive particle count, got {N_particles}")
    if kernel_width <= 0.0:
        raise DomainError(f"kernel width must be positive, got {kernel_width}")
    z = (float(E) - spec.eigenvalues) / kernel_width
    log_dos = float(logsumexp(-0.5 * z ** 2)) - np.log(kernel_width * np.sqrt(2.0 * np.pi))
    dE = float(np.std(spec.eigenvalues)) / np.sqrt(N_particles)
    if dE <= 0.0:
        raise DomainError("flat spectrum: energy window dE is zero")
    return log_dos + np.log(dE)
