"""Reduced dynamics of the cluster register with the free spins traced out.

The environment starts each step in ``|+>^L``.  Projecting B site ``x`` on
``|+>`` or ``|->`` leaves the A-site factors ``K_+ = cos(g/2) e^{igX/2}`` and
``K_- = sin(g/2) e^{-igX/2} Y``, so the Kraus operators are
``M_n = C(J) prod_x K_{n_x}`` with ``C(J)`` the cluster layer.  Register
states are dense ``2^L x 2^L`` matrices; site ``x`` is bit ``x``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .entanglement import Partition, CLUSTER_SPLIT, entropy_from_spectrum, negativity_report
from .lattice import PERIODIC, LatticeLayout, PauliString, SizeGuardError, dense_pauli

MAX_CELLS = 6
CHECK_CELLS = 5

_I2 = np.eye(2, dtype=np.complex128)
_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)

STRONG = "strong"
WEAK = "weak"


def _guard(L: int, max_cells: int = MAX_CELLS) -> None:
    if L < 1:
        raise ValueError("register needs at least one site")
    if L > max_cells:
        raise SizeGuardError(f"dense channel limited to L <= {max_cells}, got {L}")


def _site_op(op: np.ndarray, x: int, L: int) -> np.ndarray:
    out = np.ones((1, 1), dtype=np.complex128)
    for q in reversed(range(L)):
        out = np.kron(out, op if q == x else _I2)
    return out


def _expx(theta: float) -> np.ndarray:
    """``exp(i theta X)`` on one qubit."""
    return math.cos(theta) * _I2 + 1j * math.sin(theta) * _X


def swap_expectations(g: float) -> tuple[np.ndarray, np.ndarray]:
    """``<+_B|SW(g)|+_B>`` and ``<-_B|SW(g)|+_B>`` as 2x2 operators on the A site."""
    k_plus = math.cos(g / 2) * _expx(g / 2)
    k_minus = math.sin(g / 2) * _expx(-g / 2) @ _Y
    return k_plus, k_minus


def cluster_layer(L: int, J: float, boundary: str = PERIODIC) -> np.ndarray:
    """Dense ``prod_x exp(i J Z_{x-1} X_x Z_{x+1})`` on an ``L``-site register."""
    _guard(L)
    # the A chain of a ladder layout indexes A site x as qubit 2x; remap to bit x
    layout = LatticeLayout(L, boundary)
    out = np.eye(1 << L, dtype=np.complex128)
    for x in range(L):
        phase, stab = layout.cluster_stabilizer(x)
        local = PauliString(tuple((q // 2, a) for q, a in stab.ops))
        P = phase * dense_pauli(local, L)
        out = (math.cos(J) * np.eye(1 << L) + 1j * math.sin(J) * P) @ out
    return out


def field_layer(L: int, theta: float) -> np.ndarray:
    """``prod_x exp(i theta X_x)``."""
    out = np.ones((1, 1), dtype=np.complex128)
    for _ in range(L):
        out = np.kron(out, _expx(theta))
    return out


def u0(L: int, J: float, g: float, boundary: str = PERIODIC) -> np.ndarray:
    """Coherent part of every Kraus operator: cluster layer after a ``g/2`` field layer."""
    return cluster_layer(L, J, boundary) @ field_layer(L, g / 2)


def effective_hamiltonian(L: int, J: float, g: float, boundary: str = PERIODIC) -> np.ndarray:
    """``H_0 = -J sum Z X Z - (g/2) sum X`` whose first-order propagator is ``u0``."""
    _guard(L)
    layout = LatticeLayout(L, boundary)
    H = np.zeros((1 << L, 1 << L), dtype=np.complex128)
    for x in range(L):
        phase, stab = layout.cluster_stabilizer(x)
        local = PauliString(tuple((q // 2, a) for q, a in stab.ops))
        H -= J * phase * dense_pauli(local, L)
        H -= 0.5 * g * _site_op(_X, x, L)
    return H


def flip_sites(n: int, L: int) -> list[int]:
    """Sites flipped by Kraus index ``n``; site ``x`` is bit ``L - 1 - x`` of ``n``."""
    return [x for x in range(L) if (n >> (L - 1 - x)) & 1]


@dataclass
class KrausSet:
    """Kraus family ``M_n`` on the A register, indexed by environment outcome ``n``."""

    L: int
    J: float
    g: float
    ops: np.ndarray = field(repr=False)
    flips: list[list[int]] = field(repr=False)
    u0: np.ndarray = field(repr=False)
    boundary: str = PERIODIC

    @property
    def flip_counts(self) -> np.ndarray:
        return np.array([len(f) for f in self.flips])

    def weight(self, n: int) -> float:
        """Scalar prefactor ``cos^{L-|n|}(g/2) sin^{|n|}(g/2)``."""
        f = len(self.flips[n])
        return math.cos(self.g / 2) ** (self.L - f) * math.sin(self.g / 2) ** f

    def completeness_error(self) -> float:
        s = np.einsum("nji,njk->ik", self.ops.conj(), self.ops)
        return float(np.max(np.abs(s - np.eye(1 << self.L))))


def build_kraus(L: int, J: float, g: float, boundary: str = PERIODIC,
                max_cells: int = MAX_CELLS) -> KrausSet:
    """All ``2^L`` Kraus operators ``M_n = <n_B| U |+_B^L>``."""
    _guard(L, max_cells)
    k_plus, k_minus = swap_expectations(g)
    cl = cluster_layer(L, J, boundary)
    dim = 1 << L
    ops = np.empty((dim, dim, dim), dtype=np.complex128)
    flips = []
    for n in range(dim):
        fs = flip_sites(n, L)
        flips.append(fs)
        local = np.ones((1, 1), dtype=np.complex128)
        for x in reversed(range(L)):
            local = np.kron(local, k_minus if x in fs else k_plus)
        ops[n] = cl @ local
    kraus = KrausSet(L, J, g, ops, flips, u0(L, J, g, boundary), boundary)
    if L <= CHECK_CELLS:
        err = kraus.completeness_error()
        if err > 1e-12:
            raise RuntimeError(f"Kraus completeness violated: {err:.3e}")
    return kraus


def kraus_from_factorization(kraus: KrausSet, n: int) -> np.ndarray:
    """``M_n`` rebuilt as ``weight * u0 * prod_{x in n} e^{-igX_x} Y_x``."""
    L, g = kraus.L, kraus.g
    out = np.eye(1 << L, dtype=np.complex128)
    for x in kraus.flips[n]:
        out = out @ _site_op(_expx(-g) @ _Y, x, L)
    return kraus.weight(n) * kraus.u0 @ out


@dataclass
class ChannelState:
    """Register density matrix, step counter and accumulated raw weight."""

    rho: np.ndarray
    step: int = 0
    weight: float = 1.0

    @property
    def trace(self) -> float:
        return float(np.trace(self.rho).real)

    @property
    def purity(self) -> float:
        return float(np.vdot(self.rho, self.rho).real)


def markov_step(state: ChannelState, kraus: KrausSet) -> ChannelState:
    """``rho -> sum_n M_n rho M_n^dagger``."""
    if state.rho.shape != kraus.ops.shape[1:]:
        raise ValueError("state and Kraus dimensions differ")
    # fixed summation order over n keeps the result deterministic
    tmp = np.matmul(kraus.ops, state.rho)
    rho = np.einsum("nij,nkj->ik", tmp, kraus.ops.conj())
    return ChannelState(0.5 * (rho + rho.conj().T), state.step + 1, state.weight)


def coherent_step(state: ChannelState, J: float, g: float, boundary: str = PERIODIC) -> ChannelState:
    """Single all-flip term ``u0(-g) Y^L rho Y^L u0(-g)^dagger``, renormalized.

    The raw term carries ``sin^{2L}(g/2)``, which is multiplied into
    ``state.weight``; the returned ``rho`` has unit trace.
    """
    L = int(state.rho.shape[0]).bit_length() - 1
    _guard(L)
    w = math.sin(g / 2) ** (2 * L)
    if w == 0.0:
        raise ValueError("coherent term is empty for g = 0 (mod 2 pi)")
    ys = np.ones((1, 1), dtype=np.complex128)
    for _ in range(L):
        ys = np.kron(ys, _Y)
    u = u0(L, J, -g, boundary) @ ys
    rho = u @ state.rho @ u.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    rho /= np.trace(rho).real
    return ChannelState(rho, state.step + 1, state.weight * w)


def parity_matrix(L: int) -> np.ndarray:
    return dense_pauli(PauliString(tuple((x, "X") for x in range(L))), L)


def classify_symmetry(kraus: KrausSet, n: int, tol: float = 1e-12) -> str:
    """``strong`` if ``|n_+|`` is even, else ``weak``, after checking ``P M_n P = (-1)^{|n_+|} M_n``."""
    if not 0 <= n < len(kraus.flips):
        raise IndexError(f"Kraus index {n} out of range")
    P = parity_matrix(kraus.L)
    f = len(kraus.flips[n])
    M = kraus.ops[n]
    dev = float(np.max(np.abs(P @ M @ P - (-1) ** f * M)))
    if dev > tol:
        raise RuntimeError(f"parity rule fails for n={n}: deviation {dev:.3e}")
    return STRONG if f % 2 == 0 else WEAK


def lindblad_hamiltonian(L: int, gbar: float, boundary: str = PERIODIC) -> np.ndarray:
    """``-sum_x (Z X Z + (gbar/2) X)`` in units ``J = hbar = 1``."""
    return effective_hamiltonian(L, 1.0, gbar, boundary)


def lindblad_rhs(rho: np.ndarray, H: np.ndarray | None, ys: list[np.ndarray], rate: float) -> np.ndarray:
    out = -1j * (H @ rho - rho @ H) if H is not None else np.zeros_like(rho)
    for y in ys:
        out += rate * (y @ rho @ y - rho)
    return out


@dataclass
class LindbladSeries:
    times: np.ndarray
    states: list[np.ndarray] = field(repr=False)
    max_trace_drift: float = 0.0


def lindblad_evolve(rho0: np.ndarray, gbar: float, dt: float, T: float,
                    record_every: int = 1, include_hamiltonian: bool = True,
                    boundary: str = PERIODIC, drift_tol: float = 1e-8) -> LindbladSeries:
    """Integrate ``d rho/dt = -i[H, rho] + (gbar^2/4) sum_x (Y_x rho Y_x - rho)`` with RK4.

    The state is Hermitized after every step.  Raises if the trace drifts
    by more than ``drift_tol``.
    """
    L = int(rho0.shape[0]).bit_length() - 1
    _guard(L)
    if dt > 0.01:
        raise ValueError(f"dt={dt} exceeds the 0.01 step limit")
    if dt <= 0 or T < 0:
        raise ValueError("dt must be positive and T nonnegative")
    H = lindblad_hamiltonian(L, gbar, boundary) if include_hamiltonian else None
    ys = [_site_op(_Y, x, L) for x in range(L)]
    rate = gbar**2 / 4
    n_steps = int(round(T / dt))
    rho = np.array(rho0, dtype=np.complex128)
    tr0 = np.trace(rho).real
    times, states = [0.0], [rho.copy()]
    drift = 0.0
    for i in range(1, n_steps + 1):
        k1 = lindblad_rhs(rho, H, ys, rate)
        k2 = lindblad_rhs(rho + 0.5 * dt * k1, H, ys, rate)
        k3 = lindblad_rhs(rho + 0.5 * dt * k2, H, ys, rate)
        k4 = lindblad_rhs(rho + dt * k3, H, ys, rate)
        rho = rho + (dt / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        rho = 0.5 * (rho + rho.conj().T)
        drift = max(drift, abs(np.trace(rho).real - tr0))
        if drift > drift_tol:
            raise RuntimeError(f"trace drift {drift:.3e} exceeds {drift_tol:.1e}; reduce dt")
        if i % record_every == 0 or i == n_steps:
            times.append(i * dt)
            states.append(rho.copy())
    return LindbladSeries(np.array(times), states, drift)


def channel_diagnostics(rho: np.ndarray, split: Partition | None = None) -> dict:
    """Trace, purity, entropy and negativity of a register state."""
    L = int(rho.shape[0]).bit_length() - 1
    if split is None:
        split = Partition(CLUSTER_SPLIT, max(L // 2, 1))
    out = {"trace": float(np.trace(rho).real), "purity": float(np.vdot(rho, rho).real),
           "entropy": entropy_from_spectrum(np.linalg.eigvalsh(rho))}
    if L >= 2:
        rep = negativity_report(rho, split)
        out["logneg"], out["lambda_min"] = rep.log_negativity, rep.lambda_min
    else:
        out["logneg"], out["lambda_min"] = float("nan"), float("nan")
    return out
