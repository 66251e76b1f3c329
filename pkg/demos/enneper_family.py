"""A two-end minimal surface from three exponentials, checked pointwise.

The immersion (L - conj(H), Re Phi) with L, H, Phi exponentials in z is
conformal and minimal exactly when L'H' = (Phi'/2)^2. For the admissible
parameters r1 = sqrt(5), r2 = 1, d = r1 - r2 the identity holds to rounding,
and the conformal factor decays at one end.

    python3 demos/enneper_family.py [out.obj]
"""

import math
import sys

import numpy as np

from halfspace.surfgeo import fundamental_forms
from halfspace.surfgeo.mesh import grid_faces, write_obj
from halfspace.weierstrass import EnneperParams, EnneperSurface

p = EnneperParams(math.sqrt(5.0), 1.0, math.sqrt(5.0) - 1.0, strict=True)
S = EnneperSurface(p)

U, V = np.meshgrid(np.linspace(-2, 2, 41), np.linspace(-2, 2, 41), indexing="ij")
ff = fundamental_forms(S, U.ravel(), V.ravel())
res = S.minimality_residual(U.ravel() + 1j * V.ravel())
print(f"max |L'H' - (Phi'/2)^2| = {res.max():.2e}, max |H| = {np.abs(ff.H).max():.2e}, "
      f"K in [{ff.K.min():.3f}, {ff.K.max():.3f}]")

for u in (0.0, -5.0, -10.0, -20.0):
    print(f"  lambda({u:>5g}) = {S.conformal_factor(u):.3e}")

out = sys.argv[1] if len(sys.argv) > 1 else None
if out:
    write_obj(out, S.position(U, V).reshape(-1, 3), grid_faces(41, 41), header="enneper_andrade sqrt5, 1")
    print("wrote", out)
