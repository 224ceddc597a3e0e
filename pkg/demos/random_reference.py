"""
How many random states does the environment look like?
======================================================

Mix m Haar-random states and compare the partial-transpose witness with the
one reached by the automaton.  The m that matches is the effective size of
the environment.
"""

from ladderqca import AutomatonParams, LatticeLayout, Trajectory, evolve
from ladderqca import randomref as rr
from ladderqca.automaton import stationary_window

cells = 6
curve = rr.lambda_curve(cells, trials=8, seed=0, cap_log2=10)
print(" log2 m   mean lambda")
for k, m in zip(curve.log2_m, curve.mean):
    print(f"{int(k):6d}   {m:+.4f}")

print("\n gbar   lambda    m")
for gbar in (0.5, 2.0, 5.0):
    s = evolve(Trajectory(AutomatonParams.from_gbar(0.3, gbar, LatticeLayout(cells)),
                          steps=600, cadence=5, observables=frozenset({"S_half", "lambda_min"})))
    w, _ = stationary_window(s.S_half)
    lam = s.lambda_min[w].mean()
    est = rr.estimate_m(lam, curve, clip_low=True)
    tag = " (below m=1)" if est.clipped else " (at cap)" if est.at_cap else ""
    print(f"{gbar:5.1f}  {lam:+.4f}  {est.m:8.1f}{tag}")
