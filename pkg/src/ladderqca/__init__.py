"""Two-leg qubit ladder automaton: a cluster chain coupled to free spins.

Exact state-vector dynamics, entanglement and negativity diagnostics, the
mean-field band picture, the reduced Markov channel, Haar reference
mixtures and the string order parameter.
"""
__version__ = "0.1.0"

from .lattice import (OPEN, PERIODIC, LatticeLayout, PauliString, PureState, SizeGuardError,
                      build_cluster_plus, build_plus_product, expectation_pauli)
from .automaton import AutomatonParams, ObservableSeries, Trajectory, evolve, step
from .entanglement import Partition, negativity_report, reduce, von_neumann_entropy
from .meanfield import critical_point, solve_sb
from .channel import build_kraus, lindblad_evolve, markov_step
from .randomref import estimate_m, lambda_of_mixture
from .order import string_order, string_order_trajectory

__all__ = [
    "OPEN", "PERIODIC", "LatticeLayout", "PauliString", "PureState", "SizeGuardError",
    "build_cluster_plus", "build_plus_product", "expectation_pauli",
    "AutomatonParams", "ObservableSeries", "Trajectory", "evolve", "step",
    "Partition", "negativity_report", "reduce", "von_neumann_entropy",
    "critical_point", "solve_sb", "build_kraus", "lindblad_evolve", "markov_step",
    "estimate_m", "lambda_of_mixture", "string_order", "string_order_trajectory",
]
