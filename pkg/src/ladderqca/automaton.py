"""The one-step automaton unitary and trajectory driver.

One step applies the exchange layer ``prod_x SW_AB(g, x)`` followed by the
cluster layer ``prod_x C_A(J, x)``.  Trajectories record entanglement and
magnetization diagnostics at a fixed cadence.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import entanglement as ent
from .lattice import (
    LatticeLayout,
    PauliString,
    PureState,
    apply_cluster_gate,
    apply_pauli,
    apply_swap_gate,
    build_cluster_plus,
    build_plus_product,
    check_size,
    dense_pauli,
    expectation_pauli,
    random_state,
)

MAX_QUBITS = 24
DENSE_MAX_QUBITS = 10

CLUSTER_PLUS = "cluster-plus"
PLUS_PLUS = "plus-plus"
CUSTOM = "custom"

ALL_OBSERVABLES = frozenset({"S_half", "S_B", "logneg", "lambda_min", "magnetization", "W"})


@dataclass(frozen=True)
class AutomatonParams:
    J: float
    g: float
    layout: LatticeLayout

    def __post_init__(self):
        if not (math.isfinite(self.J) and math.isfinite(self.g)):
            raise ValueError("J and g must be finite")

    @property
    def gbar(self) -> float:
        if self.J == 0:
            raise ZeroDivisionError("gbar = g/J is undefined for J = 0")
        return self.g / self.J

    @property
    def in_meaningful_range(self) -> bool:
        return abs(self.J) < math.pi and abs(self.g) < math.pi

    @classmethod
    def from_gbar(cls, J: float, gbar: float, layout: LatticeLayout) -> "AutomatonParams":
        return cls(J, gbar * J, layout)


@dataclass
class Trajectory:
    """Inputs of one automaton run.

    ``split_block`` sets the size of each cluster-split block (default
    ``L/2``).  ``observables`` limits which diagnostics are computed; the
    rest are recorded as NaN.
    """

    params: AutomatonParams
    init: str = CLUSTER_PLUS
    steps: int = 2000
    cadence: int = 1
    seed: int = 0
    custom_state: PureState | None = None
    split_block: int | None = None
    observables: frozenset = ALL_OBSERVABLES
    keep_spectra: bool = False

    def __post_init__(self):
        if self.steps < 0:
            raise ValueError("steps must be >= 0")
        if self.cadence < 1:
            raise ValueError("cadence must be >= 1")
        if self.init not in (CLUSTER_PLUS, PLUS_PLUS, CUSTOM):
            raise ValueError(f"unknown initial state {self.init!r}")
        if self.init == CUSTOM and self.custom_state is None:
            raise ValueError("custom init needs custom_state")
        unknown = set(self.observables) - ALL_OBSERVABLES
        if unknown:
            raise ValueError(f"unknown observables {sorted(unknown)}")

    def initial_state(self) -> PureState:
        layout = self.params.layout
        if self.init == CLUSTER_PLUS:
            return build_cluster_plus(layout)
        if self.init == PLUS_PLUS:
            return build_plus_product(layout)
        if self.custom_state.layout != layout:
            raise ValueError("custom state layout does not match params")
        return self.custom_state.copy()


@dataclass
class ObservableSeries:
    """Time-indexed diagnostics of a trajectory.

    ``magnetization[r, q]`` is ``<X_q>`` at record ``r`` (even ``q`` are A
    sites).  Spectra are stored only when requested.
    """

    times: np.ndarray
    S_half: np.ndarray
    S_B: np.ndarray
    logneg: np.ndarray
    lambda_min: np.ndarray
    magnetization: np.ndarray
    W: np.ndarray
    ent_spectra: list = field(default_factory=list, repr=False)
    neg_spectra: list = field(default_factory=list, repr=False)

    def __len__(self):
        return len(self.times)

    def stationary_slice(self, window: int = 50, rel_tol: float = 0.01,
                         fraction: float = 0.25) -> slice:
        return stationary_window(self.S_half, window, rel_tol, fraction)[0]

    def stationary_mean(self, name: str, **kw) -> float:
        return float(np.mean(getattr(self, name)[self.stationary_slice(**kw)]))


def stationary_window(S: np.ndarray, window: int = 50, rel_tol: float = 0.01,
                      fraction: float = 0.25) -> tuple[slice, bool]:
    """Tail window of the statistically stationary regime.

    Saturation is the first window of ``window`` records whose mean differs
    from the previous window's by less than ``rel_tol`` (relative).  The
    returned slice is the last ``fraction`` of the records from there on.  If
    no saturation is seen (or ``S`` is all NaN) the last ``fraction`` of all
    records is used and the flag is False.
    """
    S = np.asarray(S, dtype=float)
    n = len(S)
    if n == 0:
        return slice(0, 0), False
    start, saturated = 0, False
    if np.all(np.isfinite(S)):
        w = min(window, max(1, n // 4))
        for k in range(1, n // w):
            prev = S[(k - 1) * w:k * w].mean()
            cur = S[k * w:(k + 1) * w].mean()
            if abs(cur - prev) <= rel_tol * abs(prev):
                start, saturated = k * w, True
                break
    tail = n - start
    first = start + int(math.floor((1 - fraction) * tail))
    return slice(min(first, n - 1), n), saturated


def step(state: PureState, params: AutomatonParams) -> PureState:
    """Advance ``state`` in place by one automaton step ``U(J, g)``."""
    if state.layout != params.layout:
        raise ValueError("state layout does not match params")
    L = params.layout.cells
    for x in range(L):
        apply_swap_gate(state, x, params.g)
    for x in range(L):
        apply_cluster_gate(state, x, params.J)
    return state


def step_dagger(state: PureState, params: AutomatonParams) -> PureState:
    """Apply ``U(J, g)^dagger``: cluster layer at ``-J``, then swaps at ``-g``."""
    L = params.layout.cells
    for x in range(L):
        apply_cluster_gate(state, x, -params.J)
    for x in range(L):
        apply_swap_gate(state, x, -params.g)
    return state


def swap_layer(state: PureState, g: float) -> PureState:
    for x in range(state.layout.cells):
        apply_swap_gate(state, x, g)
    return state


def string_order_pauli(layout: LatticeLayout) -> PauliString:
    """``Z_1 Y_2 X_3 ... X_{L-2} Y_{L-1} Z_L`` on the A chain (sites 1-indexed)."""
    L = layout.cells
    if L < 4:
        raise ValueError(f"string order needs L >= 4, got {L}")
    ops = {layout.a(0): "Z", layout.a(1): "Y", layout.a(L - 2): "Y", layout.a(L - 1): "Z"}
    for x in range(2, L - 2):
        ops[layout.a(x)] = "X"
    return PauliString.from_dict(ops)


def measure(state: PureState, split: ent.Partition, observables=ALL_OBSERVABLES,
            keep_spectra: bool = False, time: int | None = None) -> dict:
    """One record of diagnostics for ``state``."""
    layout = state.layout
    L = layout.cells
    nan = float("nan")
    rec = {"S_half": nan, "S_B": nan, "logneg": nan, "lambda_min": nan,
           "magnetization": np.full(layout.n_qubits, nan), "W": nan}
    if "S_half" in observables:
        keep = ent.Partition(ent.HALF_LADDER).keep_qubits(layout)
        rec["S_half"] = ent.von_neumann_entropy(ent.reduce(state, keep, max_qubits=MAX_QUBITS // 2))
    needs_rho_a = {"S_B", "logneg", "lambda_min"} & set(observables) or keep_spectra
    if needs_rho_a:
        rho_a = ent.reduce(state, layout.a_qubits, max_qubits=MAX_QUBITS // 2)
        if "S_B" in observables or keep_spectra:
            spec_a = ent.entanglement_spectrum(rho_a)
            # the global state is pure, so S(rho_B) = S(rho_A)
            rec["S_B"] = ent.entropy_from_spectrum(spec_a)
            if keep_spectra:
                rec["ent_spectrum"] = spec_a
        if {"logneg", "lambda_min"} & set(observables) or keep_spectra:
            report = ent.negativity_report(rho_a, split, time=time)
            rec["logneg"] = report.log_negativity
            rec["lambda_min"] = report.lambda_min
            if keep_spectra:
                rec["neg_spectrum"] = report.eigenvalues
    if "magnetization" in observables:
        rec["magnetization"] = np.array(
            [expectation_pauli(state, PauliString(((q, "X"),))) for q in range(layout.n_qubits)]
        )
    if "W" in observables and L >= 4:
        rec["W"] = (-1) ** L * expectation_pauli(state, string_order_pauli(layout))
    return rec


def evolve(trajectory: Trajectory, max_qubits: int = MAX_QUBITS) -> ObservableSeries:
    """Iterate the automaton and record diagnostics every ``cadence`` steps.

    Records are taken at ``t = 0, cadence, 2 cadence, ... <= steps``.
    """
    params = trajectory.params
    layout = params.layout
    check_size(layout.n_qubits, max_qubits)
    split = ent.Partition(ent.CLUSTER_SPLIT, trajectory.split_block)
    obs = frozenset(trajectory.observables)
    state = trajectory.initial_state()
    records = []
    times = []
    for t in range(trajectory.steps + 1):
        if t > 0:
            step(state, params)
        if t % trajectory.cadence == 0:
            times.append(t)
            records.append(measure(state, split, obs, trajectory.keep_spectra, time=t))
    return _collect(times, records, layout)


def _collect(times, records, layout) -> ObservableSeries:
    def col(name):
        return np.array([r[name] for r in records], dtype=float)

    mag = np.array([r["magnetization"] for r in records], dtype=float).reshape(len(records), layout.n_qubits)
    return ObservableSeries(
        times=np.array(times, dtype=np.int64),
        S_half=col("S_half"),
        S_B=col("S_B"),
        logneg=col("logneg"),
        lambda_min=col("lambda_min"),
        magnetization=mag,
        W=col("W"),
        ent_spectra=[r["ent_spectrum"] for r in records if "ent_spectrum" in r],
        neg_spectra=[r["neg_spectrum"] for r in records if "neg_spectrum" in r],
    )


def parity_operator(layout: LatticeLayout) -> PauliString:
    return PauliString(tuple((q, "X") for q in range(layout.n_qubits)))


def mirror_operator(layout: LatticeLayout) -> PauliString:
    return PauliString(tuple((q, "Z") for q in layout.a_qubits))


def _random_states(layout, trials, seed):
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    return [random_state(layout, rng) for _ in range(trials)]


def check_parity_symmetry(params: AutomatonParams, trials: int = 10, seed: int = 0) -> float:
    """Max over random states of ``|| U P psi - P U psi ||`` with ``P = prod X^A X^B``."""
    P = parity_operator(params.layout)
    dev = 0.0
    for psi in _random_states(params.layout, trials, seed):
        lhs = step(apply_pauli(psi, P), params)
        rhs = apply_pauli(step(psi.copy(), params), P)
        dev = max(dev, float(np.linalg.norm(lhs.amplitudes - rhs.amplitudes)))
    return dev


def check_mirror_symmetry(params: AutomatonParams, trials: int = 10, seed: int = 0) -> float:
    """Max over random states of ``|| C U C psi - U^dagger psi ||`` with ``C = prod Z^A``.

    At finite ``(J, g)`` the two gate layers do not commute and this
    deviation is generically nonzero; see :func:`check_mirror_frame_symmetry`
    for the exact identity.
    """
    C = mirror_operator(params.layout)
    dev = 0.0
    for psi in _random_states(params.layout, trials, seed):
        lhs = apply_pauli(step(apply_pauli(psi, C), params), C)
        rhs = step_dagger(psi.copy(), params)
        dev = max(dev, float(np.linalg.norm(lhs.amplitudes - rhs.amplitudes)))
    return dev


def check_mirror_frame_symmetry(params: AutomatonParams, trials: int = 10, seed: int = 0) -> float:
    """Max deviation of ``C U C = V U^dagger V^dagger`` with ``V`` the exchange layer.

    The identity holds exactly, so ``U`` and ``U^dagger`` are unitarily
    equivalent and the quasienergy spectrum is symmetric about zero.
    """
    C = mirror_operator(params.layout)
    dev = 0.0
    for psi in _random_states(params.layout, trials, seed):
        lhs = apply_pauli(step(apply_pauli(psi, C), params), C)
        rhs = swap_layer(step_dagger(swap_layer(psi.copy(), -params.g), params), params.g)
        dev = max(dev, float(np.linalg.norm(lhs.amplitudes - rhs.amplitudes)))
    return dev


def dense_hamiltonian(params: AutomatonParams, max_qubits: int = DENSE_MAX_QUBITS) -> np.ndarray:
    """Continuous-time generator ``H = -J sum ZXZ - (g/2) sum (XX + YY)``."""
    layout = params.layout
    n = layout.n_qubits
    check_size(n, max_qubits)
    H = np.zeros((layout.dim, layout.dim), dtype=np.complex128)
    for x in range(layout.cells):
        phase, stab = layout.cluster_stabilizer(x)
        H -= params.J * phase * dense_pauli(stab, n)
        a, b = layout.a(x), layout.b(x)
        H -= 0.5 * params.g * (dense_pauli(PauliString(((a, "X"), (b, "X"))), n)
                               + dense_pauli(PauliString(((a, "Y"), (b, "Y"))), n))
    return H


def trotter_error(params: AutomatonParams, scale: float, n_states: int = 4, seed: int = 0,
                  max_qubits: int = DENSE_MAX_QUBITS) -> float:
    """Max over a fixed random-state set of ``|| U(sJ, sg) psi - exp(-i s H) psi ||``."""
    layout = params.layout
    check_size(layout.n_qubits, max_qubits)
    if scale == 0:
        return 0.0
    energies, vecs = np.linalg.eigh(dense_hamiltonian(params, max_qubits))
    prop = (vecs * np.exp(-1j * scale * energies)) @ vecs.conj().T
    scaled = AutomatonParams(scale * params.J, scale * params.g, layout)
    err = 0.0
    for psi in _random_states(layout, n_states, seed):
        exact = prop @ psi.amplitudes
        err = max(err, float(np.linalg.norm(step(psi, scaled).amplitudes - exact)))
    return err
