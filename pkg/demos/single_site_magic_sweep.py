"""Single-qubit magic across the transverse-field XY phase diagram.

Sweeps the robustness of magic of one spin in the symmetry-broken ground
state, locates the pseudocritical onset just above the quantum critical
point, the robustness maximum, and the factorization point where the
chain hands out exact H states.

Run:  python demos/single_site_magic_sweep.py
"""

import numpy as np

from xymagic import critical_analysis as ca
from xymagic.quantum_state import fidelity, h_state
from xymagic.xy_correlators import ChainParams, single_site_state

print("Transverse Ising chain (gamma = 1)")
print(f"  {'lam':>6} {'R':>10}")
for lam in np.linspace(0.95, 2.0, 15):
    rom = ca.single_site_rom(float(lam), 1.0)
    print(f"  {lam:6.3f} {rom:10.6f}")

mpp = ca.mpp_locate(1.0, resolution=1e-7)
lam_max, r_max = ca.rom_peak(1.0)
print(f"\n  magic onset (pseudocritical point): lam = {mpp:.6f}")
print(f"  robustness maximum: R = {r_max:.6f} at lam = {lam_max:.4f}")

print("\nAnisotropy gamma = 1/3: the factorized ground state is an H state")
lam0 = ca.fgs_point(1 / 3)
state = single_site_state(ChainParams(lam=lam0, gamma=1 / 3))
print(f"  factorization point lam = {lam0:.6f}")
print(f"  single-site purity      = {state.purity():.8f}")
print(f"  fidelity to the H state = {fidelity(state, h_state()):.8f}")
print(f"  robustness              = {ca.single_site_rom(lam0, 1/3):.8f}"
      f"  (sqrt(2) - 1 = {np.sqrt(2) - 1:.8f})")
