"""Mapping the quantum critical region with two-qubit magic.

Computes the robustness of a distant pair on a coarse (lam, T) grid,
takes finite-difference derivatives, and extracts the crossover lines:
the thermal-response ridge T*(lam) and the mixed-derivative extremum
line T_M(lam), both proportional to the distance from criticality.
Inside the fan T > 2|lam - 1| the Grueneisen ratio |dR/dT| / |dR/dlam|
is small: quantum fluctuations dominate.

Run:  python demos/critical_region_map.py         (about two minutes)
"""

import numpy as np

from xymagic import critical_analysis as ca

lams = np.linspace(1.06, 1.33, 19)
ts = np.linspace(0.025, 0.6, 20)
cmap = ca.crossover_map(1.0, lams, ts, r=10, quad_tol=1e-8,
                        check_consistency=False)

print("per-column thermal-response ridge")
for i in range(0, len(lams), 3):
    t_star = cmap.t_star_points[i]
    print(f"  lam = {lams[i]:.3f}   T* = {t_star if np.isfinite(t_star) else float('nan'):.3f}"
          f"   T*/gap = {t_star / (2 * abs(lams[i] - 1)):.3f}")

print(f"\nfitted lines (through the origin, in units of the gap 2|lam-1|):")
print(f"  T*  = {cmap.t_star_slope / 2:.3f} x gap")
print(f"  T_M = {cmap.t_m_slope / 2:.3f} x gap")

fan = []
death = []
for i, lam in enumerate(lams):
    gap = 2 * abs(lam - 1)
    for j, t in enumerate(ts):
        g = gap * cmap.gruneisen[i, j]  # dimensionless: per unit gap
        if not np.isfinite(g):
            continue
        if gap < t <= 0.2:
            fan.append(g)
        elif cmap.rom[i, j] < 0.25 * cmap.rom.max() and cmap.rom[i, j] > 0:
            death.append(g)
print(f"\ngap-normalized Grueneisen ratio (thermal vs quantum sensitivity):")
print(f"  median inside the fan (gap < T <= 0.2): {np.median(fan):.3f}  << 1")
print(f"  median near the thermal-death ridge:    {np.median(death):.3f}")
