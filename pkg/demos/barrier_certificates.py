"""Barrier certificates: a log profile of the distance to N, restricted to M.

u = g(t_N) with g(t) = log((2 + eps c)/(2 + 4 c t)) is subharmonic on a
minimal surface M sitting inside the tube of a minimal surface N. Every
probe gets a certificate with two independent Laplacians: finite
differences in the parameters of M, and the trace of the ambient Hessian
over the tangent plane.

    python3 demos/barrier_certificates.py
"""

import math

import numpy as np

from halfspace.barrier import (BarrierProfile, boundary_distance_report, certify_cmc, certify_minimal,
                               hessian_eigenvalues, summarize)
from halfspace.surfgeo import Catenoid, Helicoid, Paraboloid, Plane, Sphere

# Hessian eigenvalues near a cylinder of radius 1 (curvatures -1, 0 toward the point)
p = BarrierProfile(0.4, 1.0)
print("cylinder, t = 0.1:", hessian_eigenvalues(p, 0.1, -1.0, 0.0))

# helicoid probes at small radial offsets from the catenoid
M, N = Helicoid(1.0, conformal=False), Catenoid(1.0, v_range=(-2.0, 2.0))
probes = [(u, math.cosh(u) + o) for u in np.linspace(-0.6, 0.6, 12) for o in np.linspace(0.01, 0.2, 8)]
certs = certify_minimal(M, N, probes, delta=1e-4, workers=4)
s = summarize(certs)
print(f"\nhelicoid vs catenoid: {s['n_pass']}/{s['n_certified']} pass, "
      f"worst margin {s['min_margin']:.3e}, worst disagreement {s['max_agreement']:.1e}")
c = certs[0]
print(f"  first probe: t = {c.t:.4f}, kappa = ({c.k1:.3f}, {c.k2:.3f}), mu1 + mu2 = {c.trace_lb:.4f}, "
      f"Lap u = {c.intrinsic_laplacian:.4f} vs {c.extrinsic_laplacian:.4f}")

# a flat disk inside the unit sphere: the CMC sub-equation with rhs (2c/(1+2ct)) (inf H_N - sup|H_M|)
disk = [(r * math.cos(a), r * math.sin(a)) for r in (0.8, 0.9, 0.97) for a in np.linspace(0, 6, 5)]
certs, summary = certify_cmc(Plane(), Sphere(1.0), disk, orientation=-1)
print(f"\ndisk in sphere: inf H_N = {summary['inf_HN']:.6f}, sup|H_M| = {summary['sup_HM']:.1f}, "
      f"{summarize(certs)['n_pass']} pass, min margin {summarize(certs)['min_margin']:.4f}")

# concentric spheres violate inf H_N >= sup|H_M|, and the rhs shows it
certs, summary = certify_cmc(Sphere(0.5), Sphere(1.0), [(1.0, 0.0), (2.0, 1.0)], orientation=-1)
print(f"spheres R = 0.5 in R = 1: rhs = {certs[0].rhs:.12f}, hypothesis holds: {summary['hypothesis_ok']}")

# distance to N attained on the boundary, or not
print("\nboundary reports")
for name, M, edges in [("tilted half-plane", Plane((0, 0, 0.02), normal=(0, -math.sin(0.2), math.cos(0.2)),
                                                   e1=(1, 0, 0), domain=((-1, 1), (0, 1))), ("v0",)),
                       ("paraboloid cap", Paraboloid(0.05, 0.2), ("u0", "u1", "v0", "v1"))]:
    rep = boundary_distance_report(M, Plane(), n=21, n_boundary=81, edges=edges)
    print(f"  {name}: dist(M,N) = {rep.dist_M:.4f}, dist(dM,N) = {rep.dist_boundary:.4f}, "
          f"interior exceeds boundary: {rep.interior_exceeds}")
