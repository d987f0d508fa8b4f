"""A tour of the stabilizer polytope and the robustness linear program.

Enumerates the pure stabilizer states for one and two qubits, checks a
few memberships, and solves the robustness LP for the classic extremal
states.

Run:  python demos/stabilizer_polytope_tour.py
"""

import numpy as np

from xymagic.quantum_state import bell_state, h_state, maximally_mixed, tensor_product
from xymagic.rom_solver import log_robustness, rom_lp
from xymagic.stabilizer_polytope import enumerate_polytope, membership

p1 = enumerate_polytope(1)
p2 = enumerate_polytope(2)
print(f"pure stabilizer states: {p1.n_states} (one qubit), {p2.n_states} (two qubits)")
print(f"expectation matrix A: {p2.a_matrix.shape}, rank {np.linalg.matrix_rank(p2.a_matrix)}")

print("\nmembership checks")
for name, state, poly in [
    ("maximally mixed qubit", maximally_mixed(1), p1),
    ("H state", h_state(), p1),
    ("Bell pair", bell_state(), p2),
]:
    print(f"  {name:24s} inside polytope: {membership(state, poly)}")

print("\nrobustness of magic")
for name, state, poly in [
    ("H state", h_state(), p1),
    ("H x H", tensor_product(h_state(), h_state()), p2),
    ("Bell pair", bell_state(), p2),
]:
    res = rom_lp(state, poly)
    negative = res.weights[res.weights < -1e-12]
    print(f"  {name:10s} R = {res.value:.9f}   log-robustness = "
          f"{log_robustness(state, poly):.6f} bits   "
          f"({len(negative)} negative weights, {res.iterations} pivots)")

print(f"\nreference values: sqrt(2)-1 = {np.sqrt(2)-1:.9f}, "
      f"(3 sqrt(2)-2)/3 = {(3*np.sqrt(2)-2)/3:.9f}")
