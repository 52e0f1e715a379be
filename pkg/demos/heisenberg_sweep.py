"""Non-stoquastic target: a periodic XXZ ring in a field.

For each anisotropy beta the script reports the target's ground-state
entanglement and the fast-sweep success probability for CD orders 0..3.

Run: python3 demos/heisenberg_sweep.py
"""

import numpy as np

from cdqc import AgpExpansion, build_heisenberg, min_gap, propagate
from cdqc.metrics import evaluate_trace
from cdqc.problems import ground_space, schmidt_rank

td = 0.05
print("beta   E0       Schmidt   gap      p(l=0..3)                        C_P(l=0..3)")
for beta in np.round(np.arange(0.2, 0.81, 0.1), 1):
    inst = build_heisenberg(6, g=1.0, J=0.2, beta=float(beta))
    e0, g = ground_space(inst.h_final)
    rank = schmidt_rank(g[:, 0], 3) if g.shape[1] == 1 else f"deg{g.shape[1]}"
    gap = min_gap(inst).gap
    ps, cps = [], []
    for order in range(4):
        m = evaluate_trace(propagate(inst, AgpExpansion.from_instance(inst, order), td / gap), gap)
        ps.append(m.success_probability)
        cps.append(m.mean_coherence)
    print(f"{beta:.1f}  {e0:7.4f}  {rank!s:>7}  {gap:6.4f}  "
          + " ".join(f"{p:.4f}" for p in ps) + "   " + " ".join(f"{c:.3f}" for c in cps))
