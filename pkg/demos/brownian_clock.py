"""Planar Brownian motion, its returns to the unit disk, and a conformal clock.

Brownian motion on a conformal patch with metric lambda^2 |dz|^2 is planar
Brownian motion run on the clock tau(s) = int lambda^2(B_r) dr. For the erf
surface lambda >= 1/sqrt(pi), so the clock runs at least at rate 1/pi and
never stalls. The returns themselves are slow: recurrence in the plane is
only logarithmic.

    python3 demos/brownian_clock.py
"""

import math

import numpy as np

from halfspace.stochastic import (RngSpec, neighborhood_hits, plane_immersion, recurrence_stat, sample_paths,
                                  time_change, transient_toy_lam2)
from halfspace.surfgeo import Plane
from halfspace.weierstrass import erf_conformal_factor

rng = RngSpec(42)

print("fraction of paths back in the unit disk during (T/2, T]")
for T in (10.0, 40.0, 100.0):
    rec = recurrence_stat(sample_paths(rng, 1000, 1e-3 * math.sqrt(T), T), workers=4)
    rec3 = recurrence_stat(sample_paths(rng, 1000, 1e-3 * math.sqrt(T), T, dim=3), workers=4)
    print(f"  T = {T:>5g}: plane {rec.revisit_fraction:.3f}   space {rec3.revisit_fraction:.3f}")

paths = sample_paths(rng, 500, 0.01, 25.0)
lam2 = lambda z: erf_conformal_factor(1.0, 5.0, z) ** 2
tcs = paths.map(lambda p: time_change(p, lam2, inf_lam2=1 / math.pi), workers=4)
ratios = np.array([tc.tau[-1] for tc in tcs]) / (paths.T / math.pi)
print(f"\nerf surface clock: tau(T) / (T/pi) at least {ratios.min():.3g}, "
      f"{sum(tc.overflow for tc in tcs)} paths overflow double precision")

toy = paths.map(lambda p: time_change(p, transient_toy_lam2))
print(f"lambda = exp(-|z|^2) clock: median share of tau gained in the second half "
      f"{np.median([t.plateau_ratio for t in toy]):.4f}")

print("\nhow often the image enters the slab 0 < x - 3 < eps")
N = Plane((3.0, 0.0, 0.0), normal=(1.0, 0.0, 0.0))
for T in (10.0, 40.0, 160.0):
    hs = neighborhood_hits(sample_paths(rng, 400, 1e-3 * math.sqrt(T) * 10, T), plane_immersion(), N,
                           [0.4, 0.2, 0.1], workers=4)
    print(f"  T = {T:>5g}: " + "  ".join(f"eps {e}: {f:.3f}" for e, f in zip(hs.eps_list, hs.frequencies)))
