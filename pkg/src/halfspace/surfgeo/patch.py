"""Parametrized surface patches.

A patch maps parameters ``(u, v)`` to points of R^3. Subclasses provide
``position`` and, when they can, exact ``first`` and ``second`` partials;
otherwise central differences with step ``eps^(1/3) * scale`` are used.
All evaluation methods broadcast over array arguments and return arrays with
a trailing axis of length 3.
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np

from ..errors import DomainError

_H1 = np.finfo(float).eps ** (1.0 / 3.0)
_H2 = np.finfo(float).eps ** (1.0 / 4.0)


def _stack(*cols):
    cols = np.broadcast_arrays(*[np.asarray(c, dtype=float) for c in cols])
    return np.stack(cols, axis=-1)


class SurfacePatch:
    """Base class for parametrized surfaces.

    ``domain`` is the sampling rectangle ``((u0, u1), (v0, v1))`` used for
    meshing and for distance seeds; it does not restrict Newton iterations.
    ``period_u`` marks an angular first parameter.
    """

    name = "patch"
    domain = ((-1.0, 1.0), (-1.0, 1.0))
    period_u: Optional[float] = None
    scale = 1.0

    def position(self, u, v):
        raise NotImplementedError

    def first(self, u, v):
        h = _H1 * self.scale
        xu = (self.position(u + h, v) - self.position(u - h, v)) / (2 * h)
        xv = (self.position(u, v + h) - self.position(u, v - h)) / (2 * h)
        return xu, xv

    def second(self, u, v):
        if type(self).first is not SurfacePatch.first:
            h = _H1 * self.scale
            xu_p, xv_p = self.first(u + h, v)
            xu_m, xv_m = self.first(u - h, v)
            _, xv_vp = self.first(u, v + h)
            _, xv_vm = self.first(u, v - h)
            xuu = (xu_p - xu_m) / (2 * h)
            xuv = (xv_p - xv_m) / (2 * h)
            xvv = (xv_vp - xv_vm) / (2 * h)
            return xuu, xuv, xvv
        h = _H2 * self.scale
        p = self.position
        x0 = p(u, v)
        xuu = (p(u + h, v) - 2 * x0 + p(u - h, v)) / h**2
        xvv = (p(u, v + h) - 2 * x0 + p(u, v - h)) / h**2
        xuv = (p(u + h, v + h) - p(u + h, v - h) - p(u - h, v + h) + p(u - h, v - h)) / (4 * h * h)
        return xuu, xuv, xvv

    def normal(self, u, v):
        xu, xv = self.first(u, v)
        n = np.cross(xu, xv)
        return n / np.linalg.norm(n, axis=-1, keepdims=True)

    # curvature bounds used to size tubular neighbourhoods; None when unknown
    def curvature_bound(self) -> Optional[float]:
        return None

    def gauss_bound(self) -> Optional[float]:
        return None

    def closest_uvs(self, y):
        """Closed-form nearest-point parameters, or None if not available."""
        return None

    def wrap(self, u, v):
        if self.period_u:
            u0 = self.domain[0][0]
            u = u0 + (u - u0) % self.period_u
        return u, v

    def mean_curvature_is_zero(self) -> bool:
        return False

    def describe(self) -> dict:
        return {"name": self.name}

    def __repr__(self):
        params = ", ".join(f"{k}={v!r}" for k, v in self.describe().items() if k != "name")
        return f"{type(self).__name__}({params})"


class CallablePatch(SurfacePatch):
    """Wrap user callables ``position`` (and optionally ``first``, ``second``)."""

    name = "callable"

    def __init__(self, position, first=None, second=None, domain=None, scale=1.0):
        self._position = position
        self._first = first
        self._second = second
        if domain is not None:
            self.domain = domain
        self.scale = scale

    def position(self, u, v):
        return np.asarray(self._position(u, v), dtype=float)

    def first(self, u, v):
        if self._first is None:
            return SurfacePatch.first(self, u, v)
        return self._first(u, v)

    def second(self, u, v):
        if self._second is None:
            if self._first is None:
                return _fd_second_from_position(self, u, v)
            return _fd_second_from_first(self, u, v)
        return self._second(u, v)


def _fd_second_from_first(patch, u, v):
    h = _H1 * patch.scale
    xu_p, xv_p = patch.first(u + h, v)
    xu_m, xv_m = patch.first(u - h, v)
    _, xv_vp = patch.first(u, v + h)
    _, xv_vm = patch.first(u, v - h)
    return (xu_p - xu_m) / (2 * h), (xv_p - xv_m) / (2 * h), (xv_vp - xv_vm) / (2 * h)


def _fd_second_from_position(patch, u, v):
    h = _H2 * patch.scale
    p = patch.position
    x0 = p(u, v)
    xuu = (p(u + h, v) - 2 * x0 + p(u - h, v)) / h**2
    xvv = (p(u, v + h) - 2 * x0 + p(u, v - h)) / h**2
    xuv = (p(u + h, v + h) - p(u + h, v - h) - p(u - h, v + h) + p(u - h, v - h)) / (4 * h * h)
    return xuu, xuv, xvv


def _orthonormal_pair(n):
    n = np.asarray(n, dtype=float)
    n = n / np.linalg.norm(n)
    helper = np.array([1.0, 0.0, 0.0]) if abs(n[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    if np.allclose(n, [0, 0, 1]):
        return np.array([1.0, 0, 0]), np.array([0, 1.0, 0]), n
    e1 = helper - np.dot(helper, n) * n
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(n, e1)
    return e1, e2, n


class Plane(SurfacePatch):
    """Plane through ``origin`` with unit ``normal``; parameters along an orthonormal frame."""

    name = "plane"

    def __init__(self, origin=(0.0, 0.0, 0.0), normal=(0.0, 0.0, 1.0), e1=None, domain=((-1, 1), (-1, 1))):
        self.origin = np.asarray(origin, dtype=float)
        if e1 is None:
            self.e1, self.e2, self.n = _orthonormal_pair(normal)
        else:
            n = np.asarray(normal, float) / np.linalg.norm(normal)
            e1 = np.asarray(e1, float)
            e1 = e1 - np.dot(e1, n) * n
            self.e1 = e1 / np.linalg.norm(e1)
            self.e2 = np.cross(n, self.e1)
            self.n = n
        self.domain = tuple(tuple(map(float, d)) for d in domain)

    def position(self, u, v):
        u = np.asarray(u, float)[..., None]
        v = np.asarray(v, float)[..., None]
        return self.origin + u * self.e1 + v * self.e2

    def first(self, u, v):
        shape = np.broadcast(np.asarray(u), np.asarray(v)).shape
        return np.broadcast_to(self.e1, shape + (3,)).copy(), np.broadcast_to(self.e2, shape + (3,)).copy()

    def second(self, u, v):
        shape = np.broadcast(np.asarray(u), np.asarray(v)).shape
        z = np.zeros(shape + (3,))
        return z, z.copy(), z.copy()

    def curvature_bound(self):
        return 0.0

    def gauss_bound(self):
        return 0.0

    def closest_uvs(self, y):
        d = np.asarray(y, float) - self.origin
        return [(float(d @ self.e1), float(d @ self.e2))]

    def mean_curvature_is_zero(self):
        return True

    def describe(self):
        return {"name": self.name, "origin": self.origin.tolist(), "normal": self.n.tolist()}


class Sphere(SurfacePatch):
    """Sphere of radius ``R``; (polar angle, azimuth); outward normal."""

    name = "sphere"

    def __init__(self, R=1.0, center=(0.0, 0.0, 0.0)):
        if R <= 0:
            raise DomainError("sphere radius must be positive")
        self.R = float(R)
        self.center = np.asarray(center, dtype=float)
        self.domain = ((1e-3, math.pi - 1e-3), (-math.pi, math.pi))
        self.scale = self.R

    def position(self, u, v):
        u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
        return self.center + self.R * _stack(np.sin(u) * np.cos(v), np.sin(u) * np.sin(v), np.cos(u))

    def first(self, u, v):
        u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
        R = self.R
        xu = R * _stack(np.cos(u) * np.cos(v), np.cos(u) * np.sin(v), -np.sin(u))
        xv = R * _stack(-np.sin(u) * np.sin(v), np.sin(u) * np.cos(v), np.zeros_like(u))
        return xu, xv

    def second(self, u, v):
        u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
        R = self.R
        xuu = R * _stack(-np.sin(u) * np.cos(v), -np.sin(u) * np.sin(v), -np.cos(u))
        xuv = R * _stack(-np.cos(u) * np.sin(v), np.cos(u) * np.cos(v), np.zeros_like(u))
        xvv = R * _stack(-np.sin(u) * np.cos(v), -np.sin(u) * np.sin(v), np.zeros_like(u))
        return xuu, xuv, xvv

    def curvature_bound(self):
        return 1.0 / self.R

    def gauss_bound(self):
        return 0.0

    def closest_uvs(self, y):
        d = np.asarray(y, float) - self.center
        r = np.linalg.norm(d)
        if r <= 1e-12 * self.R:
            # every point is nearest; report two antipodal feet
            return [(math.pi / 2, 0.0), (math.pi / 2, math.pi)]
        return [(math.acos(max(-1.0, min(1.0, d[2] / r))), math.atan2(d[1], d[0]))]

    def describe(self):
        return {"name": self.name, "R": self.R}


class Cylinder(SurfacePatch):
    """Circular cylinder of radius ``R`` around the z-axis; (angle, height); outward normal."""

    name = "cylinder"
    period_u = 2 * math.pi

    def __init__(self, R=1.0, height=(-2.0, 2.0)):
        if R <= 0:
            raise DomainError("cylinder radius must be positive")
        self.R = float(R)
        self.domain = ((-math.pi, math.pi), tuple(map(float, height)))
        self.scale = self.R

    def position(self, u, v):
        u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
        return _stack(self.R * np.cos(u), self.R * np.sin(u), v)

    def first(self, u, v):
        u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
        z = np.zeros_like(u)
        return _stack(-self.R * np.sin(u), self.R * np.cos(u), z), _stack(z, z, z + 1.0)

    def second(self, u, v):
        u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
        z = np.zeros_like(u)
        return _stack(-self.R * np.cos(u), -self.R * np.sin(u), z), _stack(z, z, z), _stack(z, z, z)

    def curvature_bound(self):
        return 1.0 / self.R

    def gauss_bound(self):
        return 0.0

    def closest_uvs(self, y):
        y = np.asarray(y, float)
        rho = math.hypot(y[0], y[1])
        if rho <= 1e-12 * self.R:
            return [(0.0, float(y[2])), (math.pi, float(y[2]))]
        return [(math.atan2(y[1], y[0]), float(y[2]))]

    def describe(self):
        return {"name": self.name, "R": self.R}


class Catenoid(SurfacePatch):
    """Catenoid a(cosh v cos u, cosh v sin u, v), conformal with factor a cosh v.

    Principal curvatures are +-1/(a cosh^2 v) and the outward normal points away
    from the axis.
    """

    name = "catenoid"
    period_u = 2 * math.pi

    def __init__(self, a=1.0, v_range=(-1.5, 1.5)):
        if a <= 0:
            raise DomainError("catenoid neck radius must be positive")
        self.a = float(a)
        self.domain = ((-math.pi, math.pi), tuple(map(float, v_range)))
        self.scale = self.a

    def position(self, u, v):
        u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
        a = self.a
        return a * _stack(np.cosh(v) * np.cos(u), np.cosh(v) * np.sin(u), v)

    def first(self, u, v):
        u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
        a = self.a
        xu = a * _stack(-np.cosh(v) * np.sin(u), np.cosh(v) * np.cos(u), np.zeros_like(u))
        xv = a * _stack(np.sinh(v) * np.cos(u), np.sinh(v) * np.sin(u), np.ones_like(u))
        return xu, xv

    def second(self, u, v):
        u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
        a = self.a
        z = np.zeros_like(u)
        xuu = a * _stack(-np.cosh(v) * np.cos(u), -np.cosh(v) * np.sin(u), z)
        xuv = a * _stack(-np.sinh(v) * np.sin(u), np.sinh(v) * np.cos(u), z)
        xvv = a * _stack(np.cosh(v) * np.cos(u), np.cosh(v) * np.sin(u), z)
        return xuu, xuv, xvv

    def curvature_bound(self):
        return 1.0 / self.a

    def gauss_bound(self):
        return 1.0 / self.a

    def mean_curvature_is_zero(self):
        return True

    def describe(self):
        return {"name": self.name, "a": self.a}


class Helicoid(SurfacePatch):
    """Helicoid of pitch ``a``.

    Conformal form (default): a(sinh v cos u, sinh v sin u, u).
    Ruled form (``conformal=False``): (v cos u, v sin u, a u), not conformal.
    """

    name = "helicoid"

    def __init__(self, a=1.0, conformal=True, domain=None):
        if a <= 0:
            raise DomainError("helicoid pitch must be positive")
        self.a = float(a)
        self.conformal = bool(conformal)
        self.domain = domain or ((-math.pi, math.pi), (-1.5, 1.5))
        self.scale = self.a

    def position(self, u, v):
        u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
        a = self.a
        if self.conformal:
            return a * _stack(np.sinh(v) * np.cos(u), np.sinh(v) * np.sin(u), u)
        return _stack(v * np.cos(u), v * np.sin(u), a * u)

    def first(self, u, v):
        u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
        a = self.a
        if self.conformal:
            xu = a * _stack(-np.sinh(v) * np.sin(u), np.sinh(v) * np.cos(u), np.ones_like(u))
            xv = a * _stack(np.cosh(v) * np.cos(u), np.cosh(v) * np.sin(u), np.zeros_like(u))
            return xu, xv
        xu = _stack(-v * np.sin(u), v * np.cos(u), np.full_like(u, a))
        xv = _stack(np.cos(u), np.sin(u), np.zeros_like(u))
        return xu, xv

    def second(self, u, v):
        u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
        a = self.a
        z = np.zeros_like(u)
        if self.conformal:
            xuu = a * _stack(-np.sinh(v) * np.cos(u), -np.sinh(v) * np.sin(u), z)
            xuv = a * _stack(-np.cosh(v) * np.sin(u), np.cosh(v) * np.cos(u), z)
            xvv = a * _stack(np.sinh(v) * np.cos(u), np.sinh(v) * np.sin(u), z)
            return xuu, xuv, xvv
        xuu = _stack(-v * np.cos(u), -v * np.sin(u), z)
        xuv = _stack(-np.sin(u), np.cos(u), z)
        return xuu, xuv, _stack(z, z, z)

    def curvature_bound(self):
        return 1.0 / self.a

    def gauss_bound(self):
        return 1.0 / self.a

    def mean_curvature_is_zero(self):
        return True

    def describe(self):
        return {"name": self.name, "a": self.a, "conformal": self.conformal}


class Paraboloid(SurfacePatch):
    """Graph z = height + a (x^2 + y^2) over parameters (x, y); upward normal."""

    name = "paraboloid"

    def __init__(self, height=1.0, a=0.5, domain=((-1, 1), (-1, 1))):
        self.height = float(height)
        self.a = float(a)
        self.domain = tuple(tuple(map(float, d)) for d in domain)

    def position(self, u, v):
        u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
        return _stack(u, v, self.height + self.a * (u * u + v * v))

    def first(self, u, v):
        u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
        o, z = np.ones_like(u), np.zeros_like(u)
        return _stack(o, z, 2 * self.a * u), _stack(z, o, 2 * self.a * v)

    def second(self, u, v):
        u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
        z = np.zeros_like(u)
        c = np.full_like(u, 2 * self.a)
        return _stack(z, z, c), _stack(z, z, z), _stack(z, z, c)

    def curvature_bound(self):
        return 2 * abs(self.a)

    def describe(self):
        return {"name": self.name, "height": self.height, "a": self.a}
