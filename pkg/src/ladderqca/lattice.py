"""Statevector representation of the two-leg spin ladder.

The ladder has ``L`` cells; cell ``x`` holds an A spin (cluster chain) and a
B spin (free spin).  Qubits are interleaved, ``A_x -> 2x`` and
``B_x -> 2x + 1``, and qubit 0 is the least significant bit of the basis
index.  Amplitudes are stored as a flat complex128 vector; kernels view it as
a rank-``2L`` tensor in which qubit ``q`` lives on axis ``2L - 1 - q``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import _kernels

PERIODIC = "periodic"
OPEN = "open"

_AXES = ("X", "Y", "Z")
# single-site Pauli products: (a, b) -> (phase, axis) with a.b = phase * axis
_PAULI_MUL = {
    ("X", "X"): (1, None), ("Y", "Y"): (1, None), ("Z", "Z"): (1, None),
    ("X", "Y"): (1j, "Z"), ("Y", "X"): (-1j, "Z"),
    ("Y", "Z"): (1j, "X"), ("Z", "Y"): (-1j, "X"),
    ("Z", "X"): (1j, "Y"), ("X", "Z"): (-1j, "Y"),
}


class SizeGuardError(ValueError):
    """Raised when a request exceeds a configured memory/size guard."""


@dataclass(frozen=True)
class LatticeLayout:
    """Geometry of an ``L``-cell ladder.

    Parameters
    ----------
    cells : int
        Number of AB cells ``L``.
    boundary : {"periodic", "open"}
        Boundary condition along the chain.
    """

    cells: int
    boundary: str = PERIODIC

    def __post_init__(self):
        if int(self.cells) != self.cells or self.cells < 1:
            raise ValueError(f"cells must be a positive integer, got {self.cells!r}")
        if self.boundary not in (PERIODIC, OPEN):
            raise ValueError(f"boundary must be 'periodic' or 'open', got {self.boundary!r}")

    @property
    def n_qubits(self) -> int:
        return 2 * self.cells

    @property
    def dim(self) -> int:
        return 1 << self.n_qubits

    @staticmethod
    def a(x: int) -> int:
        return 2 * x

    @staticmethod
    def b(x: int) -> int:
        return 2 * x + 1

    @property
    def a_qubits(self) -> list[int]:
        return [2 * x for x in range(self.cells)]

    @property
    def b_qubits(self) -> list[int]:
        return [2 * x + 1 for x in range(self.cells)]

    def check_cell(self, x: int) -> None:
        if not 0 <= x < self.cells:
            raise IndexError(f"cell {x} out of range for L={self.cells}")

    def neighbor(self, x: int, d: int) -> int | None:
        """Cell ``x + d``; wraps for periodic, ``None`` past an open edge."""
        y = x + d
        if self.boundary == PERIODIC:
            return y % self.cells
        return y if 0 <= y < self.cells else None

    def cluster_stabilizer(self, x: int) -> tuple[complex, "PauliString"]:
        """The ``Z X Z`` stabilizer centred on A site ``x`` as ``(phase, string)``.

        Open edges use the truncated forms ``X_0 Z_1`` and ``Z_{L-2} X_{L-1}``.
        Short periodic rings (L <= 2) fold repeated sites, e.g. ``Z_1 X_0 Z_1 = X_0``.
        """
        self.check_cell(x)
        factors = []
        left, right = self.neighbor(x, -1), self.neighbor(x, 1)
        if left is not None:
            factors.append((self.a(left), "Z"))
        factors.append((self.a(x), "X"))
        if right is not None:
            factors.append((self.a(right), "Z"))
        return pauli_product(factors)


@dataclass(frozen=True)
class PauliString:
    """Tensor product of single-qubit Paulis, at most one per qubit."""

    ops: tuple[tuple[int, str], ...]

    def __post_init__(self):
        ops = tuple(sorted((int(q), str(a).upper()) for q, a in self.ops))
        qubits = [q for q, _ in ops]
        if len(set(qubits)) != len(qubits):
            raise ValueError(f"repeated qubit in Pauli string {self.ops!r}")
        for q, a in ops:
            if a not in _AXES:
                raise ValueError(f"unknown Pauli axis {a!r}")
            if q < 0:
                raise ValueError(f"negative qubit index {q}")
        object.__setattr__(self, "ops", ops)

    @classmethod
    def from_dict(cls, ops: dict[int, str]) -> "PauliString":
        return cls(tuple(ops.items()))

    @property
    def qubits(self) -> list[int]:
        return [q for q, _ in self.ops]

    def validate(self, n_qubits: int) -> None:
        for q in self.qubits:
            if q >= n_qubits:
                raise ValueError(f"qubit {q} outside register of {n_qubits} qubits")


def pauli_product(factors: Iterable[tuple[int, str]]) -> tuple[complex, PauliString]:
    """Multiply single-site Pauli factors left to right into ``phase * string``."""
    phase: complex = 1
    site: dict[int, str] = {}
    for q, a in factors:
        a = a.upper()
        if q not in site:
            site[q] = a
            continue
        p, c = _PAULI_MUL[(site[q], a)]
        phase *= p
        if c is None:
            del site[q]
        else:
            site[q] = c
    return phase, PauliString.from_dict(site)


@dataclass
class PureState:
    """Normalized amplitude vector of the full AB ladder."""

    layout: LatticeLayout
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.ascontiguousarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (self.layout.dim,):
            raise ValueError(
                f"expected {self.layout.dim} amplitudes for L={self.layout.cells}, got {amps.shape}"
            )
        self.amplitudes = amps

    @property
    def n_qubits(self) -> int:
        return self.layout.n_qubits

    def tensor(self) -> np.ndarray:
        """Rank-``2L`` view; qubit ``q`` is axis ``2L - 1 - q``."""
        return self.amplitudes.reshape((2,) * self.n_qubits)

    def norm_sq(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def copy(self) -> "PureState":
        return PureState(self.layout, self.amplitudes.copy())


def _axis(q: int, n: int) -> int:
    return n - 1 - q


def check_size(n_qubits: int, max_qubits: int) -> None:
    if n_qubits > max_qubits:
        raise SizeGuardError(
            f"{n_qubits} qubits exceeds the configured maximum of {max_qubits}"
        )


def build_plus_product(layout: LatticeLayout) -> PureState:
    """All ``2L`` qubits in ``|+>``."""
    return PureState(layout, np.full(layout.dim, 2.0 ** (-layout.cells), dtype=np.complex128))


def cluster_register(cells: int, boundary: str = PERIODIC) -> np.ndarray:
    """Cluster state on an ``L``-qubit register (site ``x`` is bit ``x``)."""
    idx = np.arange(1 << cells)
    bits = (idx[:, None] >> np.arange(cells)) & 1
    parity = np.zeros(idx.size, dtype=np.int64)
    # short rings keep the literal product: L=2 applies CZ(0,1) twice, L=1 gives Z
    bonds = cells if boundary == PERIODIC else cells - 1
    for x in range(bonds):
        parity += bits[:, x] & bits[:, (x + 1) % cells]
    signs = 1 - 2 * (parity & 1)
    return signs.astype(np.complex128) * 2.0 ** (-cells / 2)


def embed_a_register(layout: LatticeLayout, a_vec: np.ndarray, b_vec: np.ndarray | None = None) -> PureState:
    """Product state ``|a> (A sites) x |b> (B sites)`` in the interleaved ordering."""
    L = layout.cells
    a_t = np.asarray(a_vec, dtype=np.complex128).reshape((2,) * L)
    if b_vec is None:
        b_t = np.full((2,) * L, 2.0 ** (-L / 2), dtype=np.complex128)
    else:
        b_t = np.asarray(b_vec, dtype=np.complex128).reshape((2,) * L)
    # register tensors have axes (site L-1, ..., site 0); interleave as (B_x, A_x)
    full = np.einsum(a_t, list(range(0, 2 * L, 2)), b_t, list(range(1, 2 * L, 2)),
                     _interleaved_axes(L))
    return PureState(layout, full.reshape(-1))


def _interleaved_axes(L: int) -> list[int]:
    # output axis order (B_{L-1}, A_{L-1}, ..., B_0, A_0); A labels even, B odd
    out = []
    for k in range(L):
        out.extend([2 * k + 1, 2 * k])
    return out


def build_cluster_plus(layout: LatticeLayout) -> PureState:
    """Cluster state on the A chain, ``|+>`` on every B site."""
    return embed_a_register(layout, cluster_register(layout.cells, layout.boundary))


def basis_state(layout: LatticeLayout, index: int) -> PureState:
    amps = np.zeros(layout.dim, dtype=np.complex128)
    amps[index] = 1.0
    return PureState(layout, amps)


def random_state(layout: LatticeLayout, rng: np.random.Generator) -> PureState:
    v = rng.standard_normal(layout.dim) + 1j * rng.standard_normal(layout.dim)
    return PureState(layout, v / np.linalg.norm(v))


def _apply_pauli_tensor(t: np.ndarray, pauli: PauliString) -> np.ndarray:
    """Return ``P t`` for a rank-n tensor ``t`` (new array)."""
    n = t.ndim
    flip_axes = tuple(_axis(q, n) for q, a in pauli.ops if a in "XY")
    out = np.flip(t, axis=flip_axes) if flip_axes else t
    n_y = sum(1 for _, a in pauli.ops if a == "Y")
    # Y|b> = i(-1)^b |1-b>, i.e. (Y psi)[b] = -i (-1)^b psi[1-b]
    factor = (-1j) ** n_y
    sign = None
    for q, a in pauli.ops:
        if a in "ZY":
            shape = [1] * n
            shape[_axis(q, n)] = 2
            s = np.array([1.0, -1.0]).reshape(shape)
            sign = s if sign is None else sign * s
    out = out * factor if sign is None else out * (factor * sign)
    return out if out is not t else t.copy()


def _masks(pauli: PauliString) -> tuple[int, int, complex]:
    # (P psi)[i] = base * (-1)^{|i & zmask|} * psi[i ^ flip]
    flip = zmask = 0
    n_y = 0
    for q, a in pauli.ops:
        if a in "XY":
            flip |= 1 << q
        if a in "ZY":
            zmask |= 1 << q
        n_y += a == "Y"
    return flip, zmask, complex((-1j) ** n_y)


def apply_pauli(state: PureState, pauli: PauliString, phase: complex = 1) -> PureState:
    """New state ``phase * P |psi>``."""
    pauli.validate(state.n_qubits)
    out = _apply_pauli_tensor(state.tensor(), pauli)
    return PureState(state.layout, (phase * out).reshape(-1))


def apply_pauli_rotation(state: PureState, pauli: PauliString, theta: float, phase: complex = 1) -> PureState:
    """In place ``exp(i theta phase P)``; requires ``(phase P)^2 = 1``.

    The string's qubits split the tensor into ``2^k`` fixed-sign blocks; ``P``
    pairs block ``beta`` with ``beta ^ flips``, so each pair is a 2x2 rotation
    on views with scalar coefficients.
    """
    pauli.validate(state.n_qubits)
    if _kernels.HAVE_NUMBA:
        flip, zmask, base = _masks(pauli)
        _kernels.pauli_rotation(state.amplitudes, flip, zmask, np.cos(theta),
                                1j * np.sin(theta), complex(phase * base))
        return state
    n = state.n_qubits
    t = state.tensor()
    qubits = pauli.qubits
    axes = [a for _, a in pauli.ops]
    k = len(qubits)
    flips = sum(1 << j for j, a in enumerate(axes) if a in "XY")
    base = phase * (-1j) ** axes.count("Y")
    c, s = np.cos(theta), 1j * np.sin(theta)

    def coef(beta):
        sgn = 1
        for j, a in enumerate(axes):
            if a in "ZY" and (beta >> j) & 1:
                sgn = -sgn
        return base * sgn

    def block(beta):
        idx = [slice(None)] * n
        for j, q in enumerate(qubits):
            idx[_axis(q, n)] = (beta >> j) & 1
        return tuple(idx)

    for beta in range(1 << k):
        partner = beta ^ flips
        if partner < beta:
            continue
        ib = block(beta)
        if partner == beta:
            # diagonal string on this block: exp(i theta coef) is a phase
            t[ib] *= c + s * coef(beta)
            continue
        ip = block(partner)
        vb = t[ib].copy()
        t[ib] *= c
        t[ib] += (s * coef(beta)) * t[ip]
        t[ip] *= c
        t[ip] += (s * coef(partner)) * vb
    return state


def apply_cluster_gate(state: PureState, x: int, J: float) -> PureState:
    """Apply ``exp(i J Z_{x-1} X_x Z_{x+1})`` on the A chain, in place."""
    phase, pauli = state.layout.cluster_stabilizer(x)
    if J == 0:
        return state
    return apply_pauli_rotation(state, pauli, J, phase)


def apply_swap_gate(state: PureState, x: int, g: float) -> PureState:
    """Apply ``exp(i g (XX + YY) / 2)`` on the pair ``(A_x, B_x)``, in place."""
    layout = state.layout
    layout.check_cell(x)
    if g == 0:
        return state
    if _kernels.HAVE_NUMBA:
        _kernels.swap_rotation(state.amplitudes, 1 << layout.a(x), 1 << layout.b(x),
                               np.cos(g), 1j * np.sin(g))
        return state
    n = layout.n_qubits
    t = state.tensor()
    ax_a, ax_b = _axis(layout.a(x), n), _axis(layout.b(x), n)
    i01 = [slice(None)] * n
    i10 = [slice(None)] * n
    i01[ax_a], i01[ax_b] = 0, 1
    i10[ax_a], i10[ax_b] = 1, 0
    i01, i10 = tuple(i01), tuple(i10)
    c, s = np.cos(g), 1j * np.sin(g)
    v01 = t[i01].copy()
    t[i01] = c * v01 + s * t[i10]
    t[i10] = c * t[i10] + s * v01
    return state


def expectation_pauli(state: PureState, pauli: PauliString) -> float:
    """Real expectation value ``<psi|P|psi>``."""
    pauli.validate(state.n_qubits)
    if not pauli.ops:
        return state.norm_sq()
    if _kernels.HAVE_NUMBA:
        flip, zmask, base = _masks(pauli)
        return float(_kernels.pauli_expectation(state.amplitudes, flip, zmask, base).real)
    val = np.vdot(state.tensor(), _apply_pauli_tensor(state.tensor(), pauli))
    return float(val.real)


def magnetization_x(state: PureState) -> np.ndarray:
    """``<X_q>`` for every qubit ``q = 0 .. 2L-1``."""
    n = state.n_qubits
    t = state.tensor()
    out = np.empty(n)
    for q in range(n):
        ax = _axis(q, n)
        lo = np.take(t, 0, axis=ax)
        hi = np.take(t, 1, axis=ax)
        out[q] = 2.0 * np.vdot(lo, hi).real
    return out


def inner_product(a: PureState, b: PureState) -> complex:
    """``<a|b>``."""
    if a.layout != b.layout:
        raise ValueError(f"layout mismatch: {a.layout} vs {b.layout}")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def dense_pauli(pauli: PauliString, n_qubits: int) -> np.ndarray:
    """Dense ``2^n x 2^n`` matrix of a Pauli string (small registers only)."""
    check_size(n_qubits, 14)
    mats = {
        "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
        "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
        "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
    }
    ops = dict(pauli.ops)
    out = np.ones((1, 1), dtype=np.complex128)
    for q in reversed(range(n_qubits)):
        out = np.kron(out, mats[ops[q]] if q in ops else np.eye(2))
    return out


def qubits_of_cells(layout: LatticeLayout, cells: Sequence[int]) -> list[int]:
    return sorted([layout.a(x) for x in cells] + [layout.b(x) for x in cells])
