"""Finite-size scaling of the robustness derivative from exact
diagonalization of short open chains.

For each length the finite-size order parameter is estimated from the
long-range transverse correlator, the single-site robustness curve is
differentiated, and the per-size curves are collapsed onto a master
curve by tuning the two scaling exponents.  Desk-scale lengths carry
visible corrections; the exponents drift toward the infinite-chain pair
as the window of lengths grows.

Run:  python demos/finite_size_collapse.py        (about two minutes)
"""

import numpy as np

from xymagic import critical_analysis as ca

study = ca.fss_study(1.0, sizes=(8, 10, 12, 14), eig_tol=1e-7,
                     mu_range=(0.5, 3.0), nu_range=(0.5, 2.0))

print("finite-size critical points (peak of the order-parameter derivative)")
for n in study.sizes:
    print(f"  N = {n:2d}   lam_c = {study.lam_c[n]:.4f}")

res = study.collapse
print(f"\nbest collapse: mu = {res.mu:.3f}, nu = {res.nu:.3f}")
print(f"rescaled spread {res.collapse_cost:.2e} vs unrescaled "
      f"{res.unrescaled_cost:.2e} "
      f"({res.unrescaled_cost / res.collapse_cost:.0f}x improvement)")
print("\n(infinite-chain reference pair is (0.88, 1.00); short open chains"
      "\n sit above it and drift toward it as the lengths grow)")
