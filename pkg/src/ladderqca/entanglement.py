"""Reduced states, entropies and negativity spectra.

Density matrices are plain complex ``ndarray`` objects.  Inside a register of
``n`` qubits, local qubit ``j`` is bit ``j`` of the row/column index, the same
little-endian convention used by :mod:`ladderqca.lattice`.  All logarithms
are base 2.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .lattice import LatticeLayout, PureState, check_size

HALF_LADDER = "half-ladder"
SUBLATTICE = "sublattice"
CLUSTER_SPLIT = "cluster-split"

CLIP = 1e-10
NEGATIVE_TOL = 1e-8


@dataclass(frozen=True)
class Partition:
    """One of the three cuts used to characterize the ladder.

    ``half-ladder`` keeps the first ``block`` cells (default ``L/2``);
    ``sublattice`` separates A from B; ``cluster-split`` divides the A chain
    into contiguous blocks ``A1 = [0, block)`` and ``A2 = [block, 2 block)``,
    tracing out any remaining A sites.  The default block is ``L/2``.
    """

    kind: str
    block: int | None = None

    def __post_init__(self):
        if self.kind not in (HALF_LADDER, SUBLATTICE, CLUSTER_SPLIT):
            raise ValueError(f"unknown partition kind {self.kind!r}")
        if self.block is not None and self.block < 1:
            raise ValueError("block size must be positive")

    def block_size(self, cells: int) -> int:
        if self.block is not None:
            return self.block
        if self.kind in (HALF_LADDER, CLUSTER_SPLIT) and cells % 2:
            raise ValueError(f"{self.kind} default needs an even number of cells, got {cells}")
        return cells // 2

    def keep_qubits(self, layout: LatticeLayout) -> list[int]:
        """Full-ladder qubits on the kept side of the cut."""
        if self.kind == HALF_LADDER:
            k = self.block_size(layout.cells)
            if k >= layout.cells:
                raise ValueError("half-ladder block must be smaller than L")
            return list(range(2 * k))
        return layout.a_qubits

    def transpose_mask(self, cells: int) -> list[int]:
        """Local A-register sites of ``A2`` for a cluster split."""
        k = self.block_size(cells)
        if 2 * k > cells:
            raise ValueError(f"cluster split of two blocks of {k} exceeds L={cells}")
        return list(range(k, 2 * k))

    def describe(self, cells: int | None = None) -> str:
        if cells is None:
            return self.kind if self.block is None else f"{self.kind}:{self.block}"
        if self.kind == SUBLATTICE:
            return SUBLATTICE
        return f"{self.kind}:{self.block_size(cells)}"


@dataclass
class SpectrumReport:
    """Partial-transpose spectrum with its witness and logarithmic negativity."""

    eigenvalues: np.ndarray = field(repr=False)
    lambda_min: float
    log_negativity: float
    partition: str
    time: int | None = None


def _n_qubits(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if 1 << n != dim:
        raise ValueError(f"matrix dimension {dim} is not a power of two")
    return n


def reduce(state: PureState, keep: Iterable[int], max_qubits: int = 14) -> np.ndarray:
    """Partial trace of ``|psi><psi|`` onto the qubits in ``keep``.

    Kept qubit ``keep[j]`` (after sorting) becomes local qubit ``j``.
    """
    keep = sorted(set(int(q) for q in keep))
    n = state.n_qubits
    if not keep or len(keep) >= n:
        raise ValueError("keep must be a nonempty proper subset of the qubits")
    if keep[0] < 0 or keep[-1] >= n:
        raise ValueError(f"kept qubit outside 0..{n - 1}")
    check_size(len(keep), max_qubits)
    return reduce_vector(state.amplitudes, n, keep)


def reduce_vector(amplitudes: np.ndarray, n: int, keep: Sequence[int]) -> np.ndarray:
    keep = sorted(keep)
    rest = [q for q in range(n) if q not in set(keep)]
    t = amplitudes.reshape((2,) * n)
    # axis of qubit q is n-1-q; most significant kept qubit first
    rows = [n - 1 - q for q in reversed(keep)]
    cols = [n - 1 - q for q in reversed(rest)]
    m = t.transpose(rows + cols).reshape(1 << len(keep), -1)
    rho = m @ m.conj().T
    return 0.5 * (rho + rho.conj().T)


def partial_trace(rho: np.ndarray, keep: Iterable[int]) -> np.ndarray:
    """Trace a register density matrix down to the local qubits ``keep``."""
    n = _n_qubits(rho.shape[0])
    keep = sorted(set(keep))
    if len(keep) == n:
        return rho.copy()
    t = rho.reshape((2,) * (2 * n))
    traced = [q for q in range(n) if q not in set(keep)]
    # contract each traced row axis with its column axis
    letters = list(range(2 * n))
    for q in traced:
        letters[2 * n - 1 - q] = letters[n - 1 - q]
    out_rows = [n - 1 - q for q in reversed(keep)]
    out_cols = [2 * n - 1 - q for q in reversed(keep)]
    out = np.einsum(t, letters, out_rows + out_cols)
    k = len(keep)
    return out.reshape(1 << k, 1 << k)


def eigenvalues(rho: np.ndarray) -> np.ndarray:
    """Ascending eigenvalues of a Hermitian matrix."""
    return np.linalg.eigvalsh(rho)


def entropy_from_spectrum(p: np.ndarray) -> float:
    p = np.asarray(p, dtype=float)
    if p.min(initial=0.0) < -NEGATIVE_TOL:
        raise ValueError(f"negative eigenvalue {p.min():.3e} in a physical spectrum")
    p = p[p > CLIP]
    return max(0.0, float(-np.sum(p * np.log2(p))))


def von_neumann_entropy(rho: np.ndarray) -> float:
    """Entropy ``-Tr rho log2 rho`` in bits."""
    return entropy_from_spectrum(eigenvalues(rho))


def partial_transpose(rho: np.ndarray, mask: Iterable[int]) -> np.ndarray:
    """Transpose the local qubits in ``mask`` of a register density matrix."""
    n = _n_qubits(rho.shape[0])
    mask = sorted(set(int(q) for q in mask))
    if mask and (mask[0] < 0 or mask[-1] >= n):
        raise ValueError(f"mask qubit outside 0..{n - 1}")
    axes = list(range(2 * n))
    for q in mask:
        r, c = n - 1 - q, 2 * n - 1 - q
        axes[r], axes[c] = axes[c], axes[r]
    t = rho.reshape((2,) * (2 * n)).transpose(axes)
    return np.ascontiguousarray(t).reshape(rho.shape)


def negativity_from_spectrum(lam: np.ndarray) -> float:
    return max(float(np.log2(np.sum(np.abs(lam)))), 0.0)


def negativity_report(rho_a: np.ndarray, split: Partition | Sequence[int] | None = None,
                      time: int | None = None) -> SpectrumReport:
    """Negativity spectrum of an A-register state under a cluster split."""
    n = _n_qubits(rho_a.shape[0])
    if split is None:
        split = Partition(CLUSTER_SPLIT)
    if isinstance(split, Partition):
        if split.kind != CLUSTER_SPLIT:
            raise ValueError("negativity_report expects a cluster-split partition")
        k = split.block_size(n)
        mask = split.transpose_mask(n)
        if 2 * k < n:
            rho_a = partial_trace(rho_a, range(2 * k))
        desc = split.describe(n)
    else:
        mask = list(split)
        desc = "mask:" + ",".join(map(str, mask))
    lam = eigenvalues(partial_transpose(rho_a, mask))
    return SpectrumReport(lam, float(lam[0]), negativity_from_spectrum(lam), desc, time)


def entanglement_spectrum(rho: np.ndarray) -> np.ndarray:
    """All eigenvalues of a density matrix, ascending."""
    return eigenvalues(rho)
