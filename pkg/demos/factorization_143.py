"""Factoring 143 with a second-order counterdiabatic sweep.

The cost (x y - 143)^2 lives on two three-bit registers; the final state's
most likely bitstrings should decode to 11 x 13.

Run: python3 demos/factorization_143.py
"""

import numpy as np

from cdqc import AgpExpansion, build_factorization, min_gap, propagate
from cdqc.metrics import success_probability
from cdqc.problems import decode_factors

inst = build_factorization(143)
n_x, n_y = inst.params["n_x"], inst.params["n_y"]
gap = min_gap(inst).gap
print(f"{inst.n_qubits} qubits, {len(inst.h_final)} Z terms, minimum gap {gap:.4f}")

for order, td in [(0, 30.0), (2, 30.0), (2, 0.5)]:
    trace = propagate(inst, AgpExpansion.from_instance(inst, order), td / gap)
    probs = np.abs(trace.final_state) ** 2
    print(f"\norder {order}, TDelta {td:g}: ground-space population "
          f"{success_probability(trace.final_state, inst):.4f}")
    for k in np.argsort(probs)[::-1][:4]:
        x, y = decode_factors(int(k), n_x, n_y)
        print(f"  {int(k):06b}  x={x:2d} y={y:2d}  x*y={x * y:3d}  prob {probs[k]:.4f}")
