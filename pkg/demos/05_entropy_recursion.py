"""Solving the star-weight equation and boosting entropy past log 2.

Given a base entropy H in (0, log 2), the weight p of the star law
(p, p, 1-2p) is pinned by H = -2p log p - (1-2p) log(1-2p), solved by
bisection on the branch p in (0, 1/3).  One star stage then adds
2p log 2, and because p grows with H the iteration reaches log 2 in
finitely many steps -- after which a single fair bit, and hence every
bit plane, is within reach.
"""

import numpy as np

from bernshift import LOG2, boost_step, run_recursion, solve_p, star_base_entropy

print("the solver inverts the three-symbol entropy on its lower branch:")
for H in (0.1, 0.3, 0.5, 0.69):
    p = solve_p(H)
    print(f"  H={H:<5} -> p={p:.10f}   residual {abs(star_base_entropy(p) - H):.2e}")

print("\none boosting step from H = 0.5:")
p, H1 = boost_step(0.5)
print(f"  p = {p:.6f}, H' = 0.5 + 2p log 2 = {H1:.6f}")

print("\nfull traces (H climbs, p never decreases):")
for H0 in (0.05, 0.2, 0.5, 0.65):
    rec = run_recursion(H0)
    hs = " -> ".join(f"{h:.4f}" for h in rec.H_sequence)
    print(f"  H0={H0:<5} {rec.steps} steps: {hs}   (log 2 = {LOG2:.4f})")

print("\nsteps needed across the whole interval:")
grid = np.linspace(0.01, 0.69, 12)
print(" ", {round(float(h), 2): run_recursion(float(h)).steps for h in grid})
