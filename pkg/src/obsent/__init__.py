"""Observational-entropy simulations on a spinless fermion chain.

Core objects: a fixed-particle-number Fock basis, chain Hamiltonians with
nearest- and next-nearest-neighbour terms, coarse-grainings represented
as an orthonormal frame plus a column partition, and entropy functionals
over ordered chains of coarse-grainings.  ``obsent.experiments`` adds the
CLI scenario runner and the randomized invariant suite.
"""

__version__ = "0.1.0"

from .coarse_graining import (
    CoarseGraining,
    MacrostateTable,
    commutes,
    energy_binned,
    factorized_blocks_cg,
    finer_set,
    from_observable,
    is_finer,
    joint,
    macrostate_table,
    positional,
    trivial,
)
from .dynamics import (
    EvolutionContext,
    evolve,
    microcanonical_mixture,
    ps_state,
    pure_thermal_state,
    quench,
    reduced_eigenstate,
)
from .errors import CapacityError, ConfigError, DomainError, NumericError
from .fock_basis import BoxPartition, FockBasis, Signature, build_basis, cached_basis
from .observational_entropy import (
    EntropyValue,
    coarse_grained_state,
    diagonal_entropy,
    entropy_of_observable,
    foe_thermal_correction,
    kl_identity_check,
    local_diagonal_decomposition,
    s_Ex,
    s_foe,
    s_obs,
    s_xE,
    short_time_bound,
)
from .operators import (
    ChainParams,
    Operator,
    QuantumState,
    build_chain_hamiltonian,
    expectation,
    partial_trace_left,
    reduce_to_sites,
)
from .spectra import (
    Spectrum,
    ThermalEnsemble,
    canonical_entropy,
    diagonal_density_matrix,
    eigendecompose,
    microcanonical_entropy,
    solve_beta,
    thermal_ensemble,
    thermal_state,
    von_neumann_entropy,
)

__all__ = [
    "__version__",
    "BoxPartition", "CapacityError", "ChainParams", "CoarseGraining",
    "ConfigError", "DomainError", "EntropyValue", "EvolutionContext",
    "FockBasis", "MacrostateTable", "NumericError", "Operator",
    "QuantumState", "Signature", "Spectrum", "ThermalEnsemble",
    "build_basis", "build_chain_hamiltonian", "cached_basis",
    "canonical_entropy", "coarse_grained_state", "commutes",
    "diagonal_density_matrix", "diagonal_entropy", "eigendecompose",
    "energy_binned", "entropy_of_observable", "evolve",
    "expectation", "factorized_blocks_cg", "finer_set",
    "foe_thermal_correction", "from_observable", "is_finer", "joint",
    "kl_identity_check", "local_diagonal_decomposition",
    "macrostate_table", "microcanonical_entropy", "microcanonical_mixture",
    "partial_trace_left", "positional", "ps_state", "pure_thermal_state",
    "quench", "reduce_to_sites", "reduced_eigenstate", "s_Ex", "s_foe",
    "s_obs", "s_xE", "short_time_bound", "solve_beta", "thermal_ensemble",
    "thermal_state", "trivial", "von_neumann_entropy",
]
