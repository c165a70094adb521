"""Scenario registry: configured experiment runs serialized to CSV rows.

Each scenario couples a complete default config with a runner returning
(metadata, header, rows).  Runners are deterministic for a fixed config
and seed; all provenance (config echo, config hash, package version,
kernel backend, eigenvector phase convention, thread count) travels in
the metadata preamble so downstream plotting needs no side channel.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .. import __version__
from .._kernels import ACTIVE_BACKEND
from ..coarse_graining import energy_binned, factorized_blocks_cg, positional
from ..dynamics import (
    EvolutionContext,
    evolve,
    microcanonical_mixture,
    ps_state,
    pure_thermal_state,
    quench,
    reduced_eigenstate,
)
from ..errors import ConfigError
from ..fock_basis import BoxPartition, cached_basis
from ..observational_entropy import (
    EXPONENTIAL_WEIGHT_DEFICIT,
    GAUSSIAN_AMPLITUDE_DEFICIT,
    diagonal_entropy,
    s_Ex,
    s_obs,
    s_xE,
)
from ..operators import (
    ChainParams,
    QuantumState,
    build_chain_hamiltonian,
    expectation,
    reduce_to_sites,
)
from ..spectra import (
    canonical_entropy,
    default_kernel_width,
    eigendecompose,
    microcanonical_entropy,
    solve_beta,
    thermal_ensemble,
    von_neumann_entropy,
)
from .config import RunConfig
from .csvio import timestamp
from .properties import run_property_suite


@dataclass(frozen=True)
class Scenario:
    scenario_id: str
    description: str
    defaults: dict
    runner: Callable


# ---------------------------------------------------------------------------
# shared pieces
# ---------------------------------------------------------------------------

_CHAIN_DEFAULTS = {
    "preset": "non_integrable",
    "t": "1.0",
    "v": "1.0",
    "strength": "0.96",
    "t_prime": "0.0",
    "v_prime": "0.0",
}

_INITIAL_DEFAULTS = {
    "kind": "reduced_eigenstate",
    "sub_sites": "8",
    "index": "11",
    "occupied": "",
}


def _chain_params(cfg: RunConfig) -> ChainParams:
    preset = cfg.get_str("chain.preset")
    t = cfg.get_float("chain.t")
    V = cfg.get_float("chain.v")
    if preset == "integrable":
        return ChainParams.integrable(t=t, V=V)
    if preset == "non_integrable":
        return ChainParams.non_integrable(t=t, V=V,
                                          strength=cfg.get_float("chain.strength"))
    if preset == "custom":
        return ChainParams(t=t, V=V,
                           t_prime=cfg.get_float("chain.t_prime"),
                           V_prime=cfg.get_float("chain.v_prime"))
    raise ConfigError(
        f"chain.preset: expected integrable|non_integrable|custom, got '{preset}'")


def _system(cfg: RunConfig):
    sites = cfg.get_int("system.sites")
    particles = cfg.get_int("system.particles")
    return cached_basis(sites, particles)


def _time_grid(cfg: RunConfig) -> np.ndarray:
    t_max = cfg.get_float("grid.t_max")
    points = cfg.get_int("grid.points")
    if t_max <= 0.0:
        raise ConfigError(f"grid.t_max must be positive, got {t_max}")
    if points < 2:
        raise ConfigError(f"grid.points must be at least 2, got {points}")
    return np.linspace(0.0, t_max, points)


def _initial_state(cfg: RunConfig, basis, params: ChainParams):
    """Confined starting state: a sub-chain eigenstate or an explicit bitstring."""
    kind = cfg.get_str("initial.kind")
    if kind == "reduced_eigenstate":
        sub_sites = cfg.get_int("initial.sub_sites")
        index = cfg.get_int("initial.index")
        state = reduced_eigenstate(basis, sub_sites, params, index)
        return state, f"reduced_eigenstate(sub_sites={sub_sites}, index={index})"
    if kind == "fock":
        occupied = cfg.get_int_list("initial.occupied")
        if len(set(occupied)) != basis.particles:
            raise ConfigError(
                f"initial.occupied: need {basis.particles} distinct sites, "
                f"got {occupied}")
        bits = 0
        for site in occupied:
            if not 1 <= site <= basis.sites:
                raise ConfigError(f"initial.occupied: site {site} outside 1..{basis.sites}")
            bits |= 1 << (site - 1)
        v = np.zeros(basis.dim)
        v[basis.index_of(bits)] = 1.0
        return QuantumState.pure(v), f"fock(occupied={','.join(map(str, occupied))})"
    raise ConfigError(f"initial.kind: expected reduced_eigenstate|fock, got '{kind}'")


def _norm_error(st: QuantumState) -> float:
    if st.is_pure:
        return abs(float(np.linalg.norm(st.vector)) - 1.0)
    X = st.factorized()
    return abs(float(np.sum(np.abs(X) ** 2)) - 1.0)


def _base_metadata(scenario_id: str, cfg: RunConfig) -> dict:
    md = {
        "scenario": scenario_id,
        "config_hash": cfg.hash(),
        "created": timestamp(),
        "package_version": __version__,
        "kernel_backend": ACTIVE_BACKEND,
        "blas_threads": os.environ.get("OMP_NUM_THREADS", str(os.cpu_count())),
        "phase_convention": ("evolution exp(-i*E*t); eigenvector columns scaled "
                             "so the first nonzero component is real positive"),
    }
    for path, value in cfg.flat_items():
        md[f"cfg.{path}"] = value
    return md


def _thermal_reference(spec, energy: float, particles: int) -> dict:
    """Canonical and smoothed-density-of-states entropies at one energy."""
    ens = solve_beta(spec, energy)
    width = default_kernel_width(spec, energy)
    return {
        "mean_energy": energy,
        "beta_solved": ens.beta,
        "s_canonical": canonical_entropy(ens),
        "s_microcanonical": microcanonical_entropy(spec, energy, particles, width),
        "micro_kernel_width": width,
    }


# ---------------------------------------------------------------------------
# time-series scenarios
# ---------------------------------------------------------------------------


def _run_expansion(cfg: RunConfig):
    basis = _system(cfg)
    params = _chain_params(cfg)
    H = build_chain_hamiltonian(basis, 1, basis.sites, params)
    spec = eigendecompose(H)
    s0, initial_desc = _initial_state(cfg, basis, params)
    part = BoxPartition.uniform(basis.sites, cfg.get_int("partition.boxes"))
    cg_x = positional(basis, part)
    ctx = EvolutionContext.prepare(spec, s0)
    e0 = expectation(H, s0)

    rows = []
    for t in _time_grid(cfg):
        st = evolve(ctx, float(t))
        rows.append((float(t), s_obs(st, cg_x).value, _norm_error(st),
                     abs(expectation(H, st) - e0)))
    md = {"initial_state": initial_desc, "s_max": float(np.log(basis.dim))}
    md.update(_thermal_reference(spec, e0, basis.particles))
    return md, ["t", "s_pos", "norm_err", "energy_err"], rows


def _run_eigenstate_quench(cfg: RunConfig):
    basis = _system(cfg)
    params = _chain_params(cfg)
    H = build_chain_hamiltonian(basis, 1, basis.sites, params)
    spec = eigendecompose(H)
    s0, initial_desc = _initial_state(cfg, basis, params)
    cuts = tuple(cfg.get_int_list("blocks.cuts"))
    cg_f = factorized_blocks_cg(basis, cuts, params)
    part = BoxPartition.uniform(basis.sites, cfg.get_int("partition.boxes"))
    ctx = EvolutionContext.prepare(spec, s0)
    e0 = expectation(H, s0)

    rows = []
    for t in _time_grid(cfg):
        st = evolve(ctx, float(t))
        rows.append((float(t), s_obs(st, cg_f).value,
                     s_xE(st, basis, part, spec).value,
                     _norm_error(st), abs(expectation(H, st) - e0)))
    md = {"initial_state": initial_desc}
    md.update(_thermal_reference(spec, e0, basis.particles))
    # the flat reference line plotted against the curves
    md["s_reference"] = md["s_canonical"]
    return md, ["t", "s_f", "s_xe", "norm_err", "energy_err"], rows


def _run_entanglement(cfg: RunConfig):
    basis = _system(cfg)
    params = _chain_params(cfg)
    H = build_chain_hamiltonian(basis, 1, basis.sites, params)
    spec = eigendecompose(H)
    s0, initial_desc = _initial_state(cfg, basis, params)
    cut = cfg.get_int("blocks.cut")
    if not 1 <= cut < basis.sites:
        raise ConfigError(f"blocks.cut must lie in 1..{basis.sites - 1}, got {cut}")
    ctx = EvolutionContext.prepare(spec, s0)
    e0 = expectation(H, s0)

    rows = []
    for t in _time_grid(cfg):
        st = evolve(ctx, float(t))
        left = reduce_to_sites(st, basis, 1, cut)
        right = reduce_to_sites(st, basis, cut + 1, basis.sites)
        rows.append((float(t),
                     von_neumann_entropy(left.state),
                     von_neumann_entropy(right.state),
                     _norm_error(st), abs(expectation(H, st) - e0)))
    md = {"initial_state": initial_desc, "cut": cut}
    md.update(_thermal_reference(spec, e0, basis.particles))
    # asymptote for the half-chain entanglement curves; shipped here so the
    # renderer never derives plotted numbers itself
    md["s_ent_reference"] = 0.5 * md["s_canonical"]
    return md, ["t", "s_ent_left", "s_ent_right", "norm_err", "energy_err"], rows


def _run_pure_thermal(cfg: RunConfig):
    basis = _system(cfg)
    params = _chain_params(cfg)
    pre_sites = cfg.get_int("system.pre_sites")
    if not 1 <= pre_sites < basis.sites:
        raise ConfigError(
            f"system.pre_sites must lie in 1..{basis.sites - 1}, got {pre_sites}")
    beta = cfg.get_float("thermal.beta")
    seed = cfg.get_int("run.seed")
    switch_time = cfg.get_float("quench.switch_time")

    sub = cached_basis(pre_sites, basis.particles)
    spec_sub = eigendecompose(build_chain_hamiltonian(sub, 1, pre_sites, params))
    pre = pure_thermal_state(spec_sub, beta, seed)

    H_full = build_chain_hamiltonian(basis, 1, basis.sites, params)
    spec_full = eigendecompose(H_full)
    # the confining Hamiltonian expressed on the full lattice, for the
    # per-segment diagonal entropy and conservation columns
    H_pre = build_chain_hamiltonian(basis, 1, pre_sites, params)
    spec_pre = eigendecompose(H_pre)

    cuts = tuple(cfg.get_int_list("blocks.cuts"))
    cg_f = factorized_blocks_cg(basis, cuts, params)
    part = BoxPartition.uniform(basis.sites, cfg.get_int("partition.boxes"))

    t_grid = _time_grid(cfg)
    states = quench(pre, sub, basis, params, t_grid, switch_time)

    e_pre = None
    e_post = None
    rows = []
    for t, st in zip(t_grid, states):
        pre_segment = t <= switch_time
        gov_H, gov_spec = (H_pre, spec_pre) if pre_segment else (H_full, spec_full)
        energy = expectation(gov_H, st)
        if pre_segment and e_pre is None:
            e_pre = energy
        if not pre_segment and e_post is None:
            e_post = energy
        e_ref = e_pre if pre_segment else e_post
        rows.append((float(t), s_obs(st, cg_f).value,
                     s_xE(st, basis, part, spec_full).value,
                     diagonal_entropy(st, gov_spec).value,
                     _norm_error(st), abs(energy - e_ref)))

    md = {
        "beta": beta,
        "switch_time": switch_time,
        "s_diag_convention": "governing Hamiltonian of the current segment",
        "s_canonical_pre": canonical_entropy(thermal_ensemble(spec_sub, beta)),
    }
    # post-segment thermal reference at the conserved full-chain energy
    e_full = expectation(H_full, states[-1])
    post_ref = _thermal_reference(spec_full, e_full, basis.particles)
    md["mean_energy_post"] = post_ref["mean_energy"]
    md["beta_post_solved"] = post_ref["beta_solved"]
    md["s_canonical_post"] = post_ref["s_canonical"]
    md["s_diag_post"] = diagonal_entropy(states[-1], spec_full).value
    md["s_reference"] = md["s_canonical_post"]
    return md, ["t", "s_f", "s_xe", "s_diag", "norm_err", "energy_err"], rows


def _run_s_ex_bins(cfg: RunConfig):
    basis = _system(cfg)
    params = _chain_params(cfg)
    H = build_chain_hamiltonian(basis, 1, basis.sites, params)
    spec = eigendecompose(H)
    s0, initial_desc = _initial_state(cfg, basis, params)
    part = BoxPartition.uniform(basis.sites, cfg.get_int("partition.boxes"))
    cg_x = positional(basis, part)
    m_list = cfg.get_int_list("bins.m_list")
    if not m_list or any(m < 1 for m in m_list):
        raise ConfigError(f"bins.m_list: need positive bin counts, got {m_list}")
    ctx = EvolutionContext.prepare(spec, s0)
    e0 = expectation(H, s0)

    header = ["t", "s_pos"] + [f"s_ex_m{m}" for m in m_list] + ["norm_err", "energy_err"]
    rows = []
    for t in _time_grid(cfg):
        st = evolve(ctx, float(t))
        cells = [float(t), s_obs(st, cg_x).value]
        cells += [s_Ex(st, basis, part, spec, m).value for m in m_list]
        cells += [_norm_error(st), abs(expectation(H, st) - e0)]
        rows.append(tuple(cells))
    md = {"initial_state": initial_desc,
          "m_list": ",".join(str(m) for m in m_list)}
    md.update(_thermal_reference(spec, e0, basis.particles))
    return md, header, rows


# ---------------------------------------------------------------------------
# table scenarios
# ---------------------------------------------------------------------------


def _run_entropy_vs_energy(cfg: RunConfig):
    basis = _system(cfg)
    params = _chain_params(cfg)
    H = build_chain_hamiltonian(basis, 1, basis.sites, params)
    spec = eigendecompose(H)
    cuts = tuple(cfg.get_int_list("blocks.cuts"))
    cg_f = factorized_blocks_cg(basis, cuts, params)
    part = BoxPartition.uniform(basis.sites, cfg.get_int("partition.boxes"))

    k = cfg.get_int("windows.k")
    n_centers = cfg.get_int("windows.centers")
    lo = cfg.get_float("windows.lo_frac")
    hi = cfg.get_float("windows.hi_frac")
    seed = cfg.get_int("run.seed")
    if not 0.0 < lo < hi < 1.0:
        raise ConfigError(
            f"windows.lo_frac/hi_frac must satisfy 0 < lo < hi < 1, got {lo}, {hi}")
    centers = np.unique(np.round(
        np.linspace(lo * basis.dim, hi * basis.dim, n_centers)).astype(int))
    centers = centers[(centers - k // 2 >= 1) &
                      (centers - k // 2 + k - 1 <= basis.dim)]

    rows = []
    for center in centers:
        center = int(center)
        energy = float(spec.eigenvalues[center - 1])
        ref = _thermal_reference(spec, energy, basis.particles)
        eig = QuantumState.pure(spec.eigenvectors[:, center - 1])
        ps = ps_state(spec, center, k, seed + center)
        micro = microcanonical_mixture(spec, center, k)
        rows.append((
            energy,
            ref["s_microcanonical"],
            ref["s_canonical"],
            s_obs(eig, cg_f).value, s_xE(eig, basis, part, spec).value,
            s_obs(ps, cg_f).value, s_xE(ps, basis, part, spec).value,
            s_obs(micro, cg_f).value, s_xE(micro, basis, part, spec).value,
        ))
    md = {
        "window_k": k,
        "centers_used": len(rows),
        # sampling-induced mean entropy deficits relative to the flat
        # window mixture; plotted as curve shifts, never asserted exact
        "gaussian_amplitude_deficit": GAUSSIAN_AMPLITUDE_DEFICIT,
        "exponential_weight_deficit": EXPONENTIAL_WEIGHT_DEFICIT,
    }
    header = ["energy", "s_micro", "s_canonical",
              "s_f_eigenstate", "s_xe_eigenstate",
              "s_f_ps", "s_xe_ps",
              "s_f_micro", "s_xe_micro"]
    return md, header, rows


def _run_property_suite(cfg: RunConfig):
    dims = cfg.get_int_list("suite.dims")
    trials = cfg.get_int("suite.trials")
    seed = cfg.get_int("suite.seed")
    include_chain = bool(cfg.get_int("suite.include_chain"))
    if trials < 1:
        raise ConfigError(f"suite.trials must be positive, got {trials}")
    if any(d < 2 for d in dims):
        raise ConfigError(f"suite.dims: dimensions below 2 are not meaningful: {dims}")
    report = run_property_suite(dims=dims or None, trials=trials, seed=seed,
                                include_chain=include_chain)
    header, rows = report.rows()
    md = {"suite_passed": int(report.passed)}
    return md, header, rows


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------

_SCENARIOS = (
    Scenario(
        "expansion",
        "positional-entropy growth after releasing a confined fermion gas",
        {
            "system": {"sites": "16", "particles": "4"},
            "chain": dict(_CHAIN_DEFAULTS),
            "partition": {"boxes": "4"},
            "initial": dict(_INITIAL_DEFAULTS),
            "grid": {"t_max": "60.0", "points": "241"},
        },
        _run_expansion,
    ),
    Scenario(
        "eigenstate_quench",
        "block-energy and position+energy entropies after a wall release "
        "from a confined eigenstate",
        {
            "system": {"sites": "16", "particles": "4"},
            "chain": dict(_CHAIN_DEFAULTS),
            "partition": {"boxes": "2"},
            "blocks": {"cuts": "8"},
            "initial": dict(_INITIAL_DEFAULTS),
            "grid": {"t_max": "60.0", "points": "241"},
        },
        _run_eigenstate_quench,
    ),
    Scenario(
        "entanglement",
        "half-chain entanglement entropy along the wall-release protocol",
        {
            "system": {"sites": "16", "particles": "4"},
            "chain": dict(_CHAIN_DEFAULTS),
            "blocks": {"cut": "8"},
            "initial": dict(_INITIAL_DEFAULTS),
            "grid": {"t_max": "200.0", "points": "401"},
        },
        _run_entanglement,
    ),
    Scenario(
        "pure_thermal",
        "pure state with thermal magnitudes: evolve confined, release the "
        "wall mid-run",
        {
            "system": {"sites": "16", "particles": "4", "pre_sites": "8"},
            "chain": dict(_CHAIN_DEFAULTS),
            "thermal": {"beta": "1.0"},
            "quench": {"switch_time": "30.0"},
            "partition": {"boxes": "4"},
            "blocks": {"cuts": "4,8,12"},
            "run": {"seed": "12345"},
            "grid": {"t_max": "90.0", "points": "361"},
        },
        _run_pure_thermal,
    ),
    Scenario(
        "entropy_vs_energy",
        "equilibrium entropies versus energy for eigenstate, narrow-"
        "superposition, and microcanonical-window inputs",
        {
            "system": {"sites": "20", "particles": "4"},
            "chain": dict(_CHAIN_DEFAULTS),
            "partition": {"boxes": "4"},
            "blocks": {"cuts": "5,10,15"},
            "windows": {"k": "30", "centers": "20",
                        "lo_frac": "0.3", "hi_frac": "0.7"},
            "run": {"seed": "777"},
        },
        _run_entropy_vs_energy,
    ),
    Scenario(
        "s_ex_bins",
        "energy-binned-first then positional entropy for several bin counts",
        {
            "system": {"sites": "16", "particles": "4"},
            "chain": {**_CHAIN_DEFAULTS, "preset": "integrable"},
            "partition": {"boxes": "4"},
            "bins": {"m_list": "1,8,64"},
            "initial": dict(_INITIAL_DEFAULTS),
            "grid": {"t_max": "60.0", "points": "241"},
        },
        _run_s_ex_bins,
    ),
    Scenario(
        "property_suite",
        "randomized invariant suite over the entropy machinery",
        {
            "suite": {"dims": ",".join(str(d) for d in range(4, 21)),
                      "trials": "50", "seed": "20240", "include_chain": "1"},
        },
        _run_property_suite,
    ),
)

REGISTRY = {s.scenario_id: s for s in _SCENARIOS}


def scenario_ids() -> list:
    return [s.scenario_id for s in _SCENARIOS]


def get_scenario(scenario_id: str) -> Scenario:
    try:
        return REGISTRY[scenario_id]
    except KeyError:
        known = ", ".join(scenario_ids())
        raise ConfigError(f"unknown scenario '{scenario_id}' (known: {known})") from None


def run_scenario(scenario_id: str, cfg: RunConfig):
    """Execute one scenario; returns (metadata, header, rows)."""
    scenario = get_scenario(scenario_id)
    md = _base_metadata(scenario_id, cfg)
    extra, header, rows = scenario.runner(cfg)
    md.update(extra)
    return md, header, rows
