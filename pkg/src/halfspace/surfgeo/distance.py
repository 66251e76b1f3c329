"""Signed distance to a surface, nearest-point projection and tube bookkeeping.

Principal curvatures of a foot are reported with respect to the unit normal
pointing from the foot toward the query point (the side of the tube the query
lies in). Offsetting by ``t`` along that normal maps curvature ``k`` to
``k / (1 - t k)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from ..errors import DomainError, FocalPointError
from .forms import fundamental_forms
from .mesh import MeshIndex

TIE_TOL = 1e-9


@dataclass
class Foot:
    uv: Optional[tuple]
    point: np.ndarray
    normal: np.ndarray      # unit normal toward the query point
    k1: float
    k2: float
    d1: Optional[np.ndarray] = None
    d2: Optional[np.ndarray] = None
    distance: float = 0.0


@dataclass
class TubularQuery:
    """Signed distance ``t`` with foot data; ``feet`` lists every nearest foot found."""

    query: np.ndarray
    t: float
    side: int
    feet: List[Foot]
    valid: bool = True
    eps: Optional[float] = None
    notes: List[str] = field(default_factory=list)

    @property
    def foot(self):
        return self.feet[0].point

    @property
    def k1(self):
        return self.feet[0].k1

    @property
    def k2(self):
        return self.feet[0].k2

    @property
    def normal(self):
        return self.feet[0].normal

    @property
    def multiplicity(self):
        return len(self.feet)

    @property
    def ambiguous(self):
        return len(self.feet) > 1


def focal_distance(k):
    """Distance along the chosen normal to the focal point of curvature ``k``."""
    return math.inf if k <= 0 else 1.0 / k


def parallel_curvatures(k1, k2, t, rtol=1e-12):
    """Principal curvatures of the parallel surface at signed offset ``t``.

    Raises :class:`FocalPointError` when ``t`` sits on a focal point.
    """
    out = []
    for k in (k1, k2):
        denom = 1.0 - t * k
        if abs(denom) <= rtol * max(1.0, abs(t * k)):
            raise FocalPointError(1.0 / k, f"offset t={t!r} hits the focal distance {1.0 / k!r}")
        out.append(k / denom)
    return tuple(out)


def tubular_radius(c, Lam, margin=1e-3, cap=None):
    """Admissible tube radius eps = min(1/(2 Lam), 1/(2c)) * (1 - margin).

    Zero bounds impose no constraint; when both vanish ``cap`` is returned.
    """
    if c < 0 or Lam < 0:
        raise DomainError("curvature bounds must be non-negative")
    bounds = [1.0 / (2.0 * b) for b in (Lam, c) if b > 0]
    if not bounds:
        if cap is None:
            raise DomainError("flat surface: tube radius needs an explicit cap")
        return float(cap)
    return min(bounds) * (1.0 - margin)


def project_to_patch(patch, y, uv0, tol=1e-14, max_iter=80):
    """Newton iteration for the nearest point of ``patch`` to ``y`` near ``uv0``.

    Minimizes 0.5|x(u,v) - y|^2 with the exact Hessian when it is positive
    definite and the Gauss-Newton matrix otherwise, plus backtracking.
    Returns ``(uv, point, distance, converged)``.
    """
    y = np.asarray(y, float)
    u, v = float(uv0[0]), float(uv0[1])

    def obj(u, v):
        r = patch.position(u, v) - y
        return 0.5 * float(r @ r), r

    f, r = obj(u, v)
    converged = False
    for _ in range(max_iter):
        xu, xv = patch.first(u, v)
        xuu, xuv, xvv = patch.second(u, v)
        grad = np.array([r @ xu, r @ xv])
        JtJ = np.array([[xu @ xu, xu @ xv], [xu @ xv, xv @ xv]])
        Hess = JtJ + np.array([[r @ xuu, r @ xuv], [r @ xuv, r @ xvv]])
        gnorm = math.sqrt(grad @ grad)
        scale = math.sqrt(np.trace(JtJ)) * (math.sqrt(2 * f) + patch.scale)
        if gnorm <= tol * scale:
            converged = True
            break
        try:
            if np.linalg.eigvalsh(Hess)[0] > 1e-12 * np.trace(JtJ):
                step = -np.linalg.solve(Hess, grad)
            else:
                step = -np.linalg.solve(JtJ, grad)
        except np.linalg.LinAlgError:
            break
        alpha = 1.0
        for _ in range(40):
            un, vn = u + alpha * step[0], v + alpha * step[1]
            fn, rn = obj(un, vn)
            if fn <= f - 1e-4 * alpha * abs(grad @ step) or fn <= f * (1 + 1e-15) and alpha < 1e-6:
                break
            alpha *= 0.5
        step_len = alpha * math.sqrt(step @ JtJ @ step)
        u, v, f, r = un, vn, fn, rn
        if step_len <= 1e-15 * (1.0 + math.sqrt(2 * f) + patch.scale):
            converged = True
            break
    u, v = patch.wrap(u, v)
    point = patch.position(u, v)
    return (u, v), point, float(np.linalg.norm(point - y)), converged


def _grid_seeds(patch, y, n=24, keep=6):
    (u0, u1), (v0, v1) = patch.domain
    U, V = np.meshgrid(np.linspace(u0, u1, n), np.linspace(v0, v1, n), indexing="ij")
    d = np.linalg.norm(patch.position(U, V) - y, axis=-1)
    # local minima of the sampled distance plus the global best few
    pad = np.pad(d, 1, constant_values=np.inf)
    is_min = np.ones_like(d, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di or dj:
                is_min &= d <= pad[1 + di:1 + di + n, 1 + dj:1 + dj + n]
    cand = set(zip(*np.nonzero(is_min)))
    cand.update(np.unravel_index(k, d.shape) for k in np.argsort(d, axis=None)[:2])
    cand = sorted(cand, key=lambda ij: d[ij])[:keep]
    return [(U[ij], V[ij]) for ij in cand]


def _foot_from_patch(patch, uv, point, y, orientation):
    ff = fundamental_forms(patch, uv[0], uv[1])
    n = orientation * ff.normal
    s = float(np.dot(y - point, n))
    side = 0 if s == 0 else (1 if s > 0 else -1)
    toward = n if side >= 0 else -n
    ff = fundamental_forms(patch, uv[0], uv[1], toward=toward)
    return side, Foot(tuple(map(float, uv)), np.asarray(point, float), np.asarray(ff.normal, float),
                      float(ff.k1), float(ff.k2), np.asarray(ff.d1), np.asarray(ff.d2))


def _dedupe(cands, scale, tie_tol):
    cands = sorted(cands, key=lambda c: c[2])
    dmin = cands[0][2]
    out = []
    for uv, pt, d in cands:
        if d > dmin + tie_tol * max(1.0, dmin):
            break
        if all(np.linalg.norm(pt - q[1]) > 1e-6 * scale for q in out):
            out.append((uv, pt, d))
    return out


def signed_distance(surface, y, orientation=1, mesh: Optional[MeshIndex] = None, eps=None,
                    seeds=None, tie_tol=TIE_TOL) -> TubularQuery:
    """Signed distance from ``y`` to ``surface``.

    ``surface`` is a :class:`SurfacePatch` (Newton projection, exact curvature
    at the foot) or a :class:`MeshIndex` (exact-to-mesh distance, curvature
    from the mesh is not available and is reported as nan). The sign follows
    ``orientation`` times the patch normal. Several feet within ``tie_tol``
    are all returned and flag a cut-locus point.
    """
    y = np.asarray(y, float)
    if isinstance(surface, MeshIndex):
        return _mesh_signed_distance(surface, y, orientation, eps, tie_tol)

    patch = surface
    cands = []
    closed = patch.closest_uvs(y)
    if closed is not None:
        for uv in closed:
            pt = patch.position(*uv)
            cands.append((uv, pt, float(np.linalg.norm(pt - y))))
    else:
        starts = list(seeds or [])
        if mesh is not None:
            pt, d, face, bary = mesh.nearest(y)
            uv = mesh.face_uv(face, bary)
            if uv is not None:
                starts.append(tuple(uv))
            for hpt, hd, hface, hbary in mesh.within(y, d + 2 * mesh.edge_lengths().max())[:8]:
                huv = mesh.face_uv(hface, hbary)
                if huv is not None:
                    starts.append(tuple(huv))
        if not starts:
            starts = _grid_seeds(patch, y)
        for uv0 in starts:
            uv, pt, d, ok = project_to_patch(patch, y, uv0)
            if ok:
                cands.append((uv, pt, d))
        if not cands:
            raise DomainError("nearest-point projection failed to converge from every seed")

    feet_raw = _dedupe(cands, patch.scale, tie_tol)
    feet, sides = [], []
    for uv, pt, d in feet_raw:
        side, foot = _foot_from_patch(patch, uv, pt, y, orientation)
        foot.distance = d
        feet.append(foot)
        sides.append(side)
    d = feet_raw[0][2]
    side = sides[0]
    t = side * d if side else 0.0
    q = TubularQuery(y, t, side, feet, eps=eps)
    q.valid = eps is None or abs(t) < eps
    if len(feet) > 1:
        q.notes.append(f"{len(feet)} nearest feet: cut-locus point")
    return q


def _mesh_signed_distance(mesh, y, orientation, eps, tie_tol):
    pt, d, face, bary = mesh.nearest(y)
    A, B, C = (mesh.vertices[i] for i in mesh.faces[face])
    n = orientation * np.cross(B - A, C - A)
    n = n / np.linalg.norm(n)
    s = float(np.dot(y - pt, n))
    side = 0 if s == 0 else (1 if s > 0 else -1)
    feet = []
    for hpt, hd, hface, hbary in mesh.within(y, d + tie_tol * max(1.0, d)):
        if all(np.linalg.norm(hpt - f.point) > 1e-6 for f in feet):
            feet.append(Foot(None, hpt, n if side >= 0 else -n, math.nan, math.nan, distance=hd))
    if not feet:
        feet = [Foot(None, pt, n, math.nan, math.nan, distance=d)]
    q = TubularQuery(y, side * d, side, feet, eps=eps)
    q.valid = eps is None or abs(q.t) < eps
    q.notes.append("mesh distance: O(edge^2) error relative to the smooth surface")
    return q
