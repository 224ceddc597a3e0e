import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ladderqca import entanglement as ent
from ladderqca.lattice import LatticeLayout, PureState, build_cluster_plus, build_plus_product, random_state

from oracles import naive_partial_trace, naive_partial_transpose, random_state as oracle_state

BELL = np.array([1, 0, 0, 1]) / np.sqrt(2)


def _rho(psi):
    return np.outer(psi, psi.conj())


def test_reduce_product_state_is_pure():
    s = build_plus_product(LatticeLayout(3))
    rho = ent.reduce(s, [0, 3, 4])
    assert abs(np.trace(rho @ rho).real - 1) < 1e-12


def test_reduce_bell_pair():
    s = PureState(LatticeLayout(1), BELL.astype(complex))
    assert np.allclose(ent.reduce(s, [0]), np.eye(2) / 2)


def test_reduce_rejects_bad_keep():
    s = build_plus_product(LatticeLayout(2))
    with pytest.raises(ValueError):
        ent.reduce(s, [])
    with pytest.raises(ValueError):
        ent.reduce(s, [0, 1, 2, 3])
    with pytest.raises(ValueError):
        ent.reduce(s, [9])


@given(st.integers(0, 2**16), st.sets(st.integers(0, 5), min_size=1, max_size=5))
@settings(max_examples=30, deadline=None)
def test_reduce_matches_index_loop(seed, keep):
    rng = np.random.default_rng(seed)
    psi = oracle_state(6, rng)
    s = PureState(LatticeLayout(3), psi)
    assert np.abs(ent.reduce(s, keep) - naive_partial_trace(psi, 6, sorted(keep))).max() < 1e-12


@given(st.integers(0, 2**16), st.sets(st.integers(0, 3), min_size=1, max_size=3))
@settings(max_examples=30, deadline=None)
def test_partial_trace_of_density_matrix(seed, keep):
    rng = np.random.default_rng(seed)
    psi = oracle_state(4, rng)
    ref = naive_partial_trace(psi, 4, sorted(keep))
    assert np.abs(ent.partial_trace(_rho(psi), keep) - ref).max() < 1e-12


@given(st.integers(0, 2**16), st.sets(st.integers(0, 3), max_size=4))
@settings(max_examples=30, deadline=None)
def test_partial_transpose_matches_index_loop(seed, mask):
    rng = np.random.default_rng(seed)
    rho = _rho(oracle_state(4, rng))
    pt = ent.partial_transpose(rho, mask)
    assert np.abs(pt - naive_partial_transpose(rho, 4, sorted(mask))).max() < 1e-12
    assert np.abs(pt - pt.conj().T).max() < 1e-12
    assert abs(np.trace(pt) - 1) < 1e-12
    assert np.array_equal(ent.partial_transpose(pt, mask), rho)


def test_partial_transpose_bell_and_product():
    lam = np.linalg.eigvalsh(ent.partial_transpose(_rho(BELL), [1]))
    assert np.allclose(lam, [-0.5, 0.5, 0.5, 0.5])
    rng = np.random.default_rng(0)
    a, b = oracle_state(1, rng), oracle_state(2, rng)
    prod = np.kron(_rho(b), _rho(a))
    assert np.allclose(np.linalg.eigvalsh(ent.partial_transpose(prod, [0])), np.linalg.eigvalsh(prod))


def test_entropy_examples():
    assert ent.von_neumann_entropy(_rho(BELL)) < 1e-12
    assert np.isclose(ent.von_neumann_entropy(np.eye(4) / 4), 2.0)
    with pytest.raises(ValueError):
        ent.entropy_from_spectrum(np.array([-0.1, 1.1]))


def test_entropy_additivity_and_complementarity():
    rng = np.random.default_rng(7)
    s1 = ent.partial_trace(_rho(oracle_state(3, rng)), [0])
    s2 = ent.partial_trace(_rho(oracle_state(3, rng)), [0, 1])
    S = ent.von_neumann_entropy
    assert abs(S(np.kron(s2, s1)) - S(s1) - S(s2)) < 1e-9
    state = random_state(LatticeLayout(3), rng)
    keep = [0, 2, 5]
    rest = [1, 3, 4]
    assert abs(S(ent.reduce(state, keep)) - S(ent.reduce(state, rest))) < 1e-9


def test_cluster_plus_diagnostics_16_qubits():
    lay = LatticeLayout(8)
    s = build_cluster_plus(lay)
    half = ent.Partition(ent.HALF_LADDER).keep_qubits(lay)
    assert abs(ent.von_neumann_entropy(ent.reduce(s, half)) - 2) < 1e-10
    rho_a = ent.reduce(s, lay.a_qubits)
    assert ent.von_neumann_entropy(rho_a) < 1e-10
    rep = ent.negativity_report(rho_a, ent.Partition(ent.CLUSTER_SPLIT))
    assert abs(rep.log_negativity - 2) < 1e-10
    assert abs(rep.lambda_min + 0.25) < 1e-10
    assert abs(rep.eigenvalues.sum() - 1) < 1e-10
    assert rep.partition == "cluster-split:4"


def test_cluster_block_spectrum_is_four_fold():
    # A_1 of the cluster register carries the four-fold degenerate 1/4
    lay = LatticeLayout(8)
    rho_a = ent.reduce(build_cluster_plus(lay), lay.a_qubits)
    spec = ent.entanglement_spectrum(ent.partial_trace(rho_a, range(4)))
    assert np.allclose(spec[-4:], 0.25, atol=1e-12)
    assert np.allclose(spec[:-4], 0, atol=1e-12)
    assert np.all(np.diff(spec) >= 0)


def test_separable_register_is_ppt():
    rho = np.eye(1)
    rng = np.random.default_rng(2)
    for _ in range(4):
        rho = np.kron(_rho(oracle_state(1, rng)), rho)
    rep = ent.negativity_report(rho)
    assert rep.lambda_min >= -1e-10 and rep.log_negativity <= 1e-10


def test_cluster_split_with_traced_remainder():
    # blocks of 2 on a 6-site register trace out the last two sites
    rng = np.random.default_rng(4)
    rho = _rho(oracle_state(6, rng))
    rep = ent.negativity_report(rho, ent.Partition(ent.CLUSTER_SPLIT, 2))
    ref = np.linalg.eigvalsh(naive_partial_transpose(ent.partial_trace(rho, range(4)), 4, [2, 3]))
    assert np.allclose(rep.eigenvalues, ref, atol=1e-12)
    with pytest.raises(ValueError):
        ent.Partition(ent.CLUSTER_SPLIT, 4).transpose_mask(6)


def test_negativity_zero_iff_ppt():
    rng = np.random.default_rng(9)
    for k in range(20):
        w = rng.uniform()
        rho = w * _rho(oracle_state(2, rng)) + (1 - w) * np.eye(4) / 4
        rep = ent.negativity_report(rho, [1])
        assert (rep.log_negativity <= 1e-10) == (rep.lambda_min >= -1e-10)


def test_partition_defaults_need_even_cells():
    with pytest.raises(ValueError):
        ent.Partition(ent.HALF_LADDER).block_size(5)
    with pytest.raises(ValueError):
        ent.Partition("diagonal")
    assert ent.Partition(ent.SUBLATTICE).keep_qubits(LatticeLayout(3)) == [0, 2, 4]
