"""Energy spread, speed-limit time and their relation to the sweep time.

For one QUBO instance and each CD order, prints the time-averaged energy
spread and the ratio tau_QSL / T across the sweep-time range.  The ratio
never exceeds one.

Run: python3 demos/energy_fluctuation.py
"""

import numpy as np

from cdqc import AgpExpansion, build_random_qubo, min_gap, propagate
from cdqc.metrics import evaluate_trace

inst = build_random_qubo(6, seed=4)
gap = min_gap(inst).gap
print("TDelta    " + "   ".join(f"dE(l={l})  tau/T" for l in range(4)))
for td in np.logspace(-2, 2, 7):
    cells = []
    for order in range(4):
        T = td / gap
        m = evaluate_trace(propagate(inst, AgpExpansion.from_instance(inst, order), T), gap)
        cells.append(f"{m.avg_energy_fluctuation:8.4f} {m.qsl_time / T:6.3f}")
    print(f"{td:7.3g}   " + "   ".join(cells))
