"""
Mean-field first-order transition
=================================

Replace the free spins by their mean field s_B, solve the self-consistency
condition and locate the endpoint of the nonzero branch.
"""

import numpy as np

from ladderqca import meanfield as mf

gc, sc = mf.critical_point()
print(f"nonzero branch ends at gbar_c = {gc:.4f} with s_B = {sc:.4f}")

print("\n gbar   selected s_B   roots")
for gbar in (0.0, 0.2, 0.4, 0.42, 0.43, 1.0):
    sol = mf.solve_sb(gbar)
    roots = ", ".join(f"{r:+.3f}" for r, _ in sorted(sol.roots))
    print(f"{gbar:5.2f}  {sol.s_B:12.4f}   {roots}")

# past gbar_c only s_B = 0 survives and the bands go flat at 2 gbar
scan = mf.band_scan(np.linspace(0, 1, 101), k_points=64)
gaps = scan.gaps()
i = int(np.argmin(gaps))
print(f"\nsmallest gap {gaps[i]:.4f} at gbar = {scan.selected[i].gbar:.2f}")
