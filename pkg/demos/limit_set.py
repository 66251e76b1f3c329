"""Where the erf minimal surface goes at infinity.

The surface with Weierstrass data f = (2/sqrt(pi)) e^{z^2}, g = e^{-5 z^2}
has a closed-form immersion through erf and erfi. Along the four diagonals
of the parameter plane it converges to four points, while along the axes it
runs off to infinity. This script walks outward along each ray and prints
how fast the image settles.

    python3 demos/limit_set.py
"""

import math

import numpy as np

from halfspace.weierstrass import (closed_form_chi, erf_example, erf_limit_points, gauss_curvature, immerse,
                                   limit_probe, ray_direction)

r1, r2 = 1.0, 5.0
chi = lambda z: closed_form_chi(r1, r2, z)
q = erf_limit_points(r1, r2)

print("limit points on the diagonals")
for k in (1, 3, 5, 7):
    res = limit_probe(chi, k * math.pi / 4)
    err = np.max(np.abs(res.limit - q[k]))
    print(f"  theta = {k}pi/4  limit {np.round(res.limit, 9)}  closed form {q[k]}  error {err:.1e}  rate t^-{res.rate:.2f}")

# the tail of erf along a diagonal oscillates with modulus ~ 1/t, so
# convergence is slow: at t = 40 the point is still about 6e-3 away
print("\ndistance to the limit along theta = pi/4")
for t in (10, 40, 160, 640, 1e4, 1e6):
    z = t * ray_direction(math.pi / 4)
    print(f"  t = {t:>9g}   |chi - q| = {np.max(np.abs(chi(z) - q[1])):.3e}")

print("\nalong the axes the surface leaves every ball")
for th in (0.0, math.pi / 2):
    res = limit_probe(chi, th)
    print(f"  theta = {th:.3f}: {res.verdict}, last |chi| = {np.linalg.norm(res.points[-1]):.3e}")

# the closed form against direct quadrature of the Weierstrass integrals
data = erf_example(r1, r2)
z = np.array([0.4 + 0.3j, -1.1 + 0.7j, 1.5 - 0.2j])
print("\nclosed form vs quadrature:", np.max(np.abs(chi(z) - immerse(data, z))))

# curvature on the diagonal grows like -25 pi t^2
t = np.array([0.5, 1.0, 2.0, 4.0])
print("K(t e^{i pi/4}) / (-25 pi t^2) =", gauss_curvature(data, t * ray_direction(math.pi / 4)) / (-25 * math.pi * t**2))
