"""A single spin swept from -X to Z.

For two levels one nested commutator already spans the exact gauge
potential, so the first-order counterdiabatic drive transfers the state
perfectly however fast the sweep is.

Run: python3 demos/two_level_agp.py
"""

import numpy as np

from cdqc import AgpExpansion, PauliOperator, ProblemInstance, exact_agp_dense, min_gap, propagate
from cdqc.metrics import evaluate_trace

h_i = PauliOperator(1, {"X": -1.0})
h_f = PauliOperator(1, {"Z": 1.0})
inst = ProblemInstance.custom(h_i, h_f)
gap = min_gap(inst)
print(f"minimum gap {gap.gap:.6f} at lambda = {gap.lam_at_min}  (sqrt 2 = {np.sqrt(2):.6f})")

exp1 = AgpExpansion.from_instance(inst, 1)
print("\nlambda   alpha_1    |A_1 - A_exact|")
for lam in (0.0, 0.25, 0.5, 0.75, 1.0):
    alpha = exp1.solve_alphas(lam).alphas[0]
    err = np.max(np.abs(exp1.agp_dense(lam) - exact_agp_dense(inst, lam=lam)))
    print(f"{lam:5.2f}  {alpha:9.5f}  {err:.1e}")

print("\nT*Delta   p(no CD)   p(order 1)   C_P(no CD)   C_P(order 1)")
for td in (0.05, 0.5, 5.0, 50.0):
    T = td / gap.gap
    row = []
    for order in (0, 1):
        m = evaluate_trace(propagate(inst, AgpExpansion.from_instance(inst, order), T), gap.gap)
        row.append(m)
    print(f"{td:7.2f}   {row[0].success_probability:8.5f}   {row[1].success_probability:10.7f}"
          f"   {row[0].mean_coherence:10.4f}   {row[1].mean_coherence:12.4f}")
