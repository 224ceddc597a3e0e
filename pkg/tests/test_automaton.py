import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ladderqca.automaton import (CLUSTER_PLUS, CUSTOM, PLUS_PLUS, AutomatonParams, Trajectory,
                                 check_mirror_frame_symmetry, check_mirror_symmetry,
                                 check_parity_symmetry, evolve, stationary_window, step, step_dagger,
                                 trotter_error)
from ladderqca.lattice import (OPEN, LatticeLayout, PureState, SizeGuardError, build_cluster_plus,
                               build_plus_product, inner_product, random_state)

from oracles import ladder_step_unitary, random_state as oracle_state

angles = st.floats(-3.0, 3.0, allow_nan=False)


def test_params_gbar_and_range():
    p = AutomatonParams(0.2, 1.0, LatticeLayout(2))
    assert np.isclose(p.gbar, 5.0) and p.in_meaningful_range
    assert not AutomatonParams(4.0, 0.1, LatticeLayout(2)).in_meaningful_range
    with pytest.raises(ZeroDivisionError):
        AutomatonParams(0.0, 1.0, LatticeLayout(2)).gbar
    with pytest.raises(ValueError):
        AutomatonParams(float("nan"), 1.0, LatticeLayout(2))


@pytest.mark.parametrize("boundary", ["periodic", "open"])
def test_step_matches_dense_unitary(boundary):
    rng = np.random.default_rng(11)
    lay = LatticeLayout(4, boundary)
    for _ in range(3):
        J, g = rng.uniform(-2, 2, 2)
        psi = oracle_state(8, rng)
        out = step(PureState(lay, psi.copy()), AutomatonParams(J, g, lay))
        ref = ladder_step_unitary(4, J, g, boundary) @ psi
        assert np.abs(out.amplitudes - ref).max() < 1e-12


def test_step_rejects_layout_mismatch():
    with pytest.raises(ValueError):
        step(build_plus_product(LatticeLayout(3)), AutomatonParams(0.1, 0.1, LatticeLayout(4)))


def test_cluster_state_fixed_point_at_zero_g():
    lay = LatticeLayout(5)
    s0 = build_cluster_plus(lay)
    s = step(s0.copy(), AutomatonParams(0.3, 0.0, lay))
    assert abs(inner_product(s0, s) - np.exp(1j * 0.3 * 5)) < 1e-12


@pytest.mark.parametrize("g", [np.pi / 2, 1.1, 2 * np.pi])
def test_plus_product_overlap_under_swaps(g):
    # per cell <++|SW(g)|++> = (1 + e^{ig})/2, so |++> is only fixed at g = 0 mod 2 pi
    lay = LatticeLayout(4)
    s0 = build_plus_product(lay)
    s = step(s0.copy(), AutomatonParams(0.0, g, lay))
    assert abs(inner_product(s0, s) - ((1 + np.exp(1j * g)) / 2) ** 4) < 1e-12


def test_step_dagger_inverts_step():
    rng = np.random.default_rng(1)
    lay = LatticeLayout(3)
    p = AutomatonParams(0.7, -1.3, lay)
    psi = random_state(lay, rng)
    back = step_dagger(step(psi.copy(), p), p)
    assert np.abs(back.amplitudes - psi.amplitudes).max() < 1e-12


@given(angles, angles)
@settings(max_examples=15, deadline=None)
def test_parity_symmetry(J, g):
    dev = check_parity_symmetry(AutomatonParams(J, g, LatticeLayout(4)), trials=3)
    assert 0 <= dev < 1e-12


@given(angles, angles)
@settings(max_examples=15, deadline=None)
def test_mirror_symmetry_in_exchange_frame(J, g):
    assert check_mirror_frame_symmetry(AutomatonParams(J, g, LatticeLayout(4)), trials=3) < 1e-12


def test_mirror_symmetry_literal_limits():
    lay = LatticeLayout(4)
    assert check_mirror_symmetry(AutomatonParams(0.0, 0.0, lay)) == 0
    # each layer alone satisfies the literal identity
    assert check_mirror_symmetry(AutomatonParams(0.8, 0.0, lay)) < 1e-12
    assert check_mirror_symmetry(AutomatonParams(0.0, 0.8, lay)) < 1e-12


def test_spectrum_mirror_symmetric():
    # quasienergies of U come in (e, -e) pairs
    U = ladder_step_unitary(3, 0.41, 0.77)
    ph = np.sort(np.angle(np.linalg.eigvals(U)))
    assert np.allclose(np.sort(-ph), ph, atol=1e-9)


def test_trotter_error_scales_quadratically():
    p = AutomatonParams(0.8, 0.5, LatticeLayout(4))
    assert trotter_error(p, 0.0) == 0
    ratios = [trotter_error(p, s) / s**2 for s in (0.1, 0.05, 0.025, 0.0125)]
    assert max(ratios) / min(ratios) < 2


def test_trotter_exact_without_exchange():
    p = AutomatonParams(0.9, 0.0, LatticeLayout(4))
    assert all(trotter_error(p, s) < 1e-12 for s in (0.1, 0.5, 1.0))


def test_trotter_size_guard():
    with pytest.raises(SizeGuardError):
        trotter_error(AutomatonParams(0.1, 0.1, LatticeLayout(6)), 0.1)


def test_evolve_initial_records():
    lay = LatticeLayout(8)
    s = evolve(Trajectory(AutomatonParams(0.2, 0.1, lay), steps=0))
    assert abs(s.S_half[0] - 2) < 1e-10 and abs(s.S_B[0]) < 1e-10
    assert abs(s.logneg[0] - 2) < 1e-10 and abs(s.lambda_min[0] + 0.25) < 1e-10
    assert np.allclose(s.magnetization[0, lay.b_qubits], 1)
    p = evolve(Trajectory(AutomatonParams(0.2, 0.1, LatticeLayout(4)), init=PLUS_PLUS, steps=0))
    assert abs(p.S_half[0]) < 1e-10 and abs(p.S_B[0]) < 1e-10
    assert abs(p.logneg[0]) < 1e-10 and p.lambda_min[0] > -1e-10


def test_evolve_is_deterministic_and_phase_blind():
    lay = LatticeLayout(4)
    params = AutomatonParams(0.3, 0.6, lay)
    a = evolve(Trajectory(params, steps=12, cadence=3))
    b = evolve(Trajectory(params, steps=12, cadence=3))
    assert list(a.times) == [0, 3, 6, 9, 12]
    for name in ("S_half", "S_B", "logneg", "lambda_min", "magnetization", "W"):
        assert np.array_equal(getattr(a, name), getattr(b, name), equal_nan=True)
    s0 = build_cluster_plus(lay)
    rotated = PureState(lay, np.exp(0.9j) * s0.amplitudes)
    c = evolve(Trajectory(params, init=CUSTOM, custom_state=rotated, steps=12, cadence=3))
    for name in ("S_half", "S_B", "logneg", "lambda_min", "magnetization"):
        assert np.allclose(getattr(a, name), getattr(c, name), atol=1e-12)


def test_evolve_norm_preserved():
    lay = LatticeLayout(4)
    params = AutomatonParams(0.4, 1.1, lay)
    s = build_cluster_plus(lay)
    for _ in range(200):
        step(s, params)
    assert abs(s.norm_sq() - 1) < 1e-12 * 200 * 8


def test_evolve_size_guard_and_validation():
    with pytest.raises(SizeGuardError):
        evolve(Trajectory(AutomatonParams(0.1, 0.1, LatticeLayout(13)), steps=1))
    with pytest.raises(ValueError):
        Trajectory(AutomatonParams(0.1, 0.1, LatticeLayout(2)), cadence=0)
    with pytest.raises(ValueError):
        Trajectory(AutomatonParams(0.1, 0.1, LatticeLayout(2)), init=CUSTOM)
    with pytest.raises(ValueError):
        Trajectory(AutomatonParams(0.1, 0.1, LatticeLayout(2)), observables=frozenset({"Q"}))


def test_stationary_window_rules():
    ramp = np.concatenate([np.linspace(0, 5, 200), np.full(400, 5.0)])
    sl, sat = stationary_window(ramp)
    assert sat and sl.stop == 600
    assert sl.start >= 200
    noisy = np.linspace(0, 100, 400)
    sl, sat = stationary_window(noisy)
    assert not sat and sl == slice(300, 400)


def test_open_boundary_cluster_plus_fixed_at_zero_g():
    lay = LatticeLayout(5, OPEN)
    s0 = build_cluster_plus(lay)
    s = step(s0.copy(), AutomatonParams(0.3, 0.0, lay))
    assert abs(abs(inner_product(s0, s)) - 1) < 1e-12
