"""Numerical laboratory for half-space theorems of minimal and constant mean curvature surfaces.

Subpackages
-----------
cnum         complex erf/erfi, holomorphic expression trees, Gauss-Kronrod contour quadrature
weierstrass  Weierstrass-type immersions, the erf example and the Enneper-type example
surfgeo      parametrized surfaces, fundamental forms, meshes with BVH, signed distance
barrier      log barrier profile, Hessian eigenvalues and pointwise certificates
stochastic   planar Brownian paths, recurrence statistics and conformal time change
"""

__version__ = "0.1.0"
