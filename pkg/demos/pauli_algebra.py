"""Pauli-string algebra: products, commutators and the dense-matrix check.

Run: python3 demos/pauli_algebra.py
"""

import numpy as np

from cdqc.pauli import PauliOperator, commutator, frobenius_sq, string_mul, to_dense

print("single-letter products")
for a, b in [("X", "Y"), ("Y", "Z"), ("Z", "X"), ("Z", "Z")]:
    phase, c = string_mul(a, b)
    print(f"  {a} {b} = {phase} {c}")

# the interpolating Hamiltonian at lambda = 0.3 and its commutator with dH/dlambda
h_i = PauliOperator(1, {"X": -1.0})
h_f = PauliOperator(1, {"Z": 1.0})
lam = 0.3
h = h_i * (1 - lam) + h_f * lam
print("\nH_ad(0.3) =", h.terms)
print("[H_ad, H_F - H_I] =", commutator(h, h_f - h_i).terms)

# a random three-qubit pair against its dense realization
rng = np.random.default_rng(0)
letters = ["".join(rng.choice(list("IXYZ"), 3)) for _ in range(8)]
a = PauliOperator(3, {s: rng.normal() for s in letters})
b = PauliOperator(3, {s: rng.normal() for s in letters[::-1]})
c = commutator(a, b)
da, db = to_dense(a), to_dense(b)
print(f"\nrandom pair: {len(a)} and {len(b)} terms, commutator has {len(c)} terms")
print("dense mismatch:", np.max(np.abs(to_dense(c) - (da @ db - db @ da))))
print("||a||_F^2 symbolic vs dense:", frobenius_sq(a), np.trace(da.conj().T @ da).real)
print("\ntext form of the commutator:")
print(c.to_text())
