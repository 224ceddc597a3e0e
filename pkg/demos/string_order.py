"""
String order through the transition
===================================

The open-boundary cluster state has W = 1.  Weak coupling to the free spins
keeps a finite W; strong coupling drives it to zero.
"""

from ladderqca import AutomatonParams, LatticeLayout, Trajectory
from ladderqca.lattice import OPEN
from ladderqca.order import string_order_trajectory

layout = LatticeLayout(6, OPEN)
print(" gbar   W(10)    W_inf")
for gbar in (0.25, 0.5, 1.0, 2.5):
    traj = Trajectory(AutomatonParams.from_gbar(0.2, gbar, layout), steps=800, cadence=5)
    s = string_order_trajectory(traj)
    print(f"{gbar:5.2f}  {s.W[2]:6.3f}  {s.W_inf:7.3f}")
