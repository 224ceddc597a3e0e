"""String order parameter of the cluster chain.

``W = (-1)^L <Z_1 Y_2 X_3 ... X_{L-2} Y_{L-1} Z_L>`` on the A sites.  It is
``1`` for the open-boundary cluster state and vanishes in the trivial phase.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .automaton import Trajectory, evolve, stationary_window, string_order_pauli
from .lattice import OPEN, PureState, expectation_pauli


def string_order(state: PureState) -> float:
    """``W`` of a ladder state."""
    L = state.layout.cells
    if L < 4:
        raise ValueError(f"string order needs L >= 4, got {L}")
    return (-1) ** L * expectation_pauli(state, string_order_pauli(state.layout))


@dataclass
class StringOrderSeries:
    J: float
    g: float
    boundary: str
    n_qubits: int
    times: np.ndarray
    W: np.ndarray
    W_inf: float
    window: slice = field(repr=False)
    saturated: bool = False

    @property
    def gbar(self) -> float:
        return self.g / self.J


def string_order_trajectory(trajectory: Trajectory, require_open: bool = True) -> StringOrderSeries:
    """Evolve, record ``W`` each cadence and average it over the stationary window.

    The window is located from the half-ladder entropy, as for the other
    diagnostics.
    """
    params = trajectory.params
    if require_open and params.layout.boundary != OPEN:
        raise ValueError("string order reference value assumes open boundaries; pass require_open=False")
    run = replace(trajectory, observables=frozenset({"S_half", "W"}), keep_spectra=False)
    series = evolve(run)
    window, saturated = stationary_window(series.S_half)
    W = np.asarray(series.W)
    return StringOrderSeries(params.J, params.g, params.layout.boundary, params.layout.n_qubits,
                             np.asarray(series.times), W, float(np.mean(W[window])), window, saturated)
