"""Hypothesis-driven invariants of the entropy functional.

These overlap with the randomized suite in obsent.experiments.properties on
purpose: hypothesis shrinks failures to minimal cases, while the suite
pins fixed seeds and larger dimensions.
"""

import numpy as np
from hypothesis import given, settings, strategies as st

import oracles
from obsent import CoarseGraining, QuantumState, s_obs, kl_identity_check

SLACK = 1e-9


@st.composite
def cg_instance(draw, max_dim=7, max_chain=2):
    d = draw(st.integers(min_value=2, max_value=max_dim))
    seed = draw(st.integers(min_value=0, max_value=2**32 - 1))
    chain_len = draw(st.integers(min_value=1, max_value=max_chain))
    pure = draw(st.booleans())
    return d, seed, chain_len, pure


def _build(d, seed, chain_len, pure):
    rng = np.random.default_rng(seed)
    if pure:
        v = rng.normal(size=d) + 1j * rng.normal(size=d)
        state = QuantumState.pure(v / np.linalg.norm(v))
        rho = np.outer(state.vector, state.vector.conj())
    else:
        rho = oracles.random_density_matrix(rng, d)
        state = QuantumState.mixed(rho)
    chain = []
    for _ in range(chain_len):
        n_groups = int(rng.integers(2, d + 1))
        chain.append(CoarseGraining(
            dim=d,
            frame=oracles.random_unitary(rng, d),
            groups=tuple(oracles.random_partition(rng, d, n_groups)),
            labels=tuple(range(n_groups)),
        ))
    return state, rho, chain


@settings(deadline=None, max_examples=30)
@given(cg_instance())
def test_matches_literal_oracle(case):
    state, rho, chain = _build(*case)
    got = s_obs(state, chain).value
    want = oracles.oracle_s_obs(
        rho, [oracles.materialize_projectors(c) for c in chain]
    )
    assert abs(got - want) < 1e-10


@settings(deadline=None, max_examples=30)
@given(cg_instance())
def test_bounds(case):
    state, _, chain = _build(*case)
    val = s_obs(state, chain).value
    assert -SLACK <= val <= np.log(state.dim) + SLACK


@settings(deadline=None, max_examples=30)
@given(cg_instance(max_chain=1))
def test_unitary_covariance(case):
    state, rho, (c,) = _build(*case)
    rng = np.random.default_rng(case[1] + 1)
    W = oracles.random_unitary(rng, c.dim)
    rotated_state = QuantumState.mixed(W @ rho @ W.conj().T)
    rotated_cg = CoarseGraining(dim=c.dim, frame=W @ c.frame, groups=c.groups,
                                labels=c.labels)
    assert abs(
        s_obs(rotated_state, rotated_cg).value - s_obs(state, c).value
    ) < 1e-10


@settings(deadline=None, max_examples=30)
@given(cg_instance(max_chain=1))
def test_column_shuffle_within_groups_is_invisible(case):
    state, _, (c,) = _build(*case)
    rng = np.random.default_rng(case[1] + 2)
    perm_frame = c.frame.copy()
    for g in c.groups:
        shuffled = np.asarray(g)[rng.permutation(len(g))]
        perm_frame[:, np.asarray(g)] = c.frame[:, shuffled]
    shuffled_cg = CoarseGraining(dim=c.dim, frame=perm_frame, groups=c.groups,
                                 labels=c.labels)
    assert abs(s_obs(state, shuffled_cg).value - s_obs(state, c).value) < 1e-10


@settings(deadline=None, max_examples=30)
@given(cg_instance(max_chain=1))
def test_merging_groups_never_lowers_entropy(case):
    state, _, (c,) = _build(*case)
    if c.num_groups < 2:
        return
    rng = np.random.default_rng(case[1] + 3)
    # merge a random pair of groups into one rougher coarse-graining
    i, j = rng.choice(c.num_groups, size=2, replace=False)
    merged = [np.asarray(g) for k, g in enumerate(c.groups) if k not in (i, j)]
    merged.append(np.sort(np.concatenate([c.groups[i], c.groups[j]])))
    rough = CoarseGraining(dim=c.dim, frame=c.frame, groups=tuple(merged),
                           labels=tuple(range(len(merged))))
    assert s_obs(state, rough).value >= s_obs(state, c).value - SLACK


@settings(deadline=None, max_examples=30)
@given(cg_instance(max_chain=2))
def test_appending_to_the_chain_never_raises_entropy(case):
    state, _, chain = _build(*case)
    rng = np.random.default_rng(case[1] + 4)
    d = state.dim
    n_groups = int(rng.integers(2, d + 1))
    extra = CoarseGraining(
        dim=d,
        frame=oracles.random_unitary(rng, d),
        groups=tuple(oracles.random_partition(rng, d, n_groups)),
        labels=tuple(range(n_groups)),
    )
    assert s_obs(state, chain + [extra]).value <= s_obs(state, chain).value + SLACK


@settings(deadline=None, max_examples=30)
@given(cg_instance())
def test_kl_identity(case):
    state, _, chain = _build(*case)
    assert kl_identity_check(state, chain).gap < SLACK
