"""
Cluster chain coupled to a ladder of free spins
===============================================

Start from the cluster state on the A chain with every B spin in |+>, run the
automaton and watch the cluster entanglement leak into the environment.
"""

import numpy as np

from ladderqca import AutomatonParams, LatticeLayout, Trajectory, evolve
from ladderqca.automaton import stationary_window

# 2L = 12 qubits: six cells, each holding one cluster spin and one free spin
layout = LatticeLayout(6)

# at t = 0 the half-ladder cut crosses two cluster bonds, one bit each
t0 = evolve(Trajectory(AutomatonParams(0.3, 0.0, layout), steps=0))
print(f"t=0  S_half={t0.S_half[0]:.3f}  S_B={t0.S_B[0]:.3f}  "
      f"N={t0.logneg[0]:.3f}  lambda={t0.lambda_min[0]:.3f}")

# sweep the coupling ratio gbar = g/J at fixed J
print("\n gbar   S_half   S_B     N      lambda")
for gbar in (0.25, 1.0, 2.0, 5.0):
    params = AutomatonParams.from_gbar(0.3, gbar, layout)
    s = evolve(Trajectory(params, steps=600, cadence=5))
    w, saturated = stationary_window(s.S_half)
    print(f"{gbar:5.2f}  {s.S_half[w].mean():6.3f}  {s.S_B[w].mean():6.3f}  "
          f"{s.logneg[w].mean():6.3f}  {s.lambda_min[w].mean():7.4f}"
          + ("" if saturated else "  (not saturated)"))

# weak coupling keeps the cluster negativity, strong coupling washes it out
