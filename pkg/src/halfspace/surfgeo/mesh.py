"""Triangle meshes with an axis-aligned bounding-volume hierarchy.

The hierarchy answers nearest-point queries exactly with respect to the mesh.
Meshes read and write a plain indexed text format: ``v x y z`` lines followed
by 1-based ``f i j k`` lines.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np


def closest_point_on_triangles(p, A, B, C):
    """Closest points on triangles ``(A[k], B[k], C[k])`` to the point ``p``.

    Returns ``(points, dist2, bary)``; ``bary`` holds weights of A, B, C.
    Degenerate triangles fall back to their edges.
    """
    p = np.asarray(p, float)
    AB, AC = B - A, C - A
    n = np.cross(AB, AC)
    nn = np.einsum("ij,ij->i", n, n)
    ok = nn > 1e-300
    safe = np.where(ok, nn, 1.0)
    q = p - (np.einsum("ij,ij->i", p - A, n) / safe)[:, None] * n
    wa = np.einsum("ij,ij->i", np.cross(C - B, q - B), n) / safe
    wb = np.einsum("ij,ij->i", np.cross(A - C, q - C), n) / safe
    wc = 1.0 - wa - wb
    inside = ok & (wa >= 0) & (wb >= 0) & (wc >= 0)

    best_pt = np.empty_like(A)
    best_d2 = np.full(len(A), np.inf)
    best_bary = np.zeros((len(A), 3))
    for P0, P1, i0, i1 in ((A, B, 0, 1), (B, C, 1, 2), (C, A, 2, 0)):
        e = P1 - P0
        ee = np.einsum("ij,ij->i", e, e)
        s = np.clip(np.einsum("ij,ij->i", p - P0, e) / np.where(ee > 0, ee, 1.0), 0.0, 1.0)
        pt = P0 + s[:, None] * e
        d2 = np.einsum("ij,ij->i", p - pt, p - pt)
        better = d2 < best_d2
        best_d2 = np.where(better, d2, best_d2)
        best_pt[better] = pt[better]
        bary = np.zeros((len(A), 3))
        bary[:, i0] = 1.0 - s
        bary[:, i1] = s
        best_bary[better] = bary[better]

    dq = np.einsum("ij,ij->i", p - q, p - q)
    best_pt[inside] = q[inside]
    best_d2[inside] = dq[inside]
    best_bary[inside] = np.stack([wa, wb, wc], axis=-1)[inside]
    return best_pt, best_d2, best_bary


class MeshIndex:
    """Immutable triangle mesh with a median-split AABB hierarchy.

    ``uv`` optionally stores the parameter coordinates of each vertex so that
    mesh feet can seed Newton projection on the analytic patch.
    """

    def __init__(self, vertices, faces, uv=None, leaf_size=8):
        self.vertices = np.ascontiguousarray(vertices, dtype=float)
        self.faces = np.ascontiguousarray(faces, dtype=np.int64)
        if self.faces.ndim != 2 or self.faces.shape[1] != 3:
            raise ValueError("faces must be an (m, 3) index array")
        if self.faces.size and (self.faces.min() < 0 or self.faces.max() >= len(self.vertices)):
            raise ValueError("face index out of range")
        self.uv = None if uv is None else np.asarray(uv, dtype=float)
        self.leaf_size = int(leaf_size)
        self._A = self.vertices[self.faces[:, 0]]
        self._B = self.vertices[self.faces[:, 1]]
        self._C = self.vertices[self.faces[:, 2]]
        self._build()
        for arr in (self.vertices, self.faces, self._A, self._B, self._C):
            arr.setflags(write=False)

    @property
    def n_triangles(self):
        return len(self.faces)

    def _build(self):
        tri_lo = np.minimum(np.minimum(self._A, self._B), self._C)
        tri_hi = np.maximum(np.maximum(self._A, self._B), self._C)
        centroid = (self._A + self._B + self._C) / 3.0
        order = np.arange(self.n_triangles)
        lo, hi, left, right, start, count = [], [], [], [], [], []

        def new_node(s, e):
            idx = order[s:e]
            lo.append(tri_lo[idx].min(axis=0))
            hi.append(tri_hi[idx].max(axis=0))
            left.append(-1)
            right.append(-1)
            start.append(s)
            count.append(e - s)
            return len(lo) - 1

        if self.n_triangles == 0:
            raise ValueError("mesh has no triangles")
        stack = [(new_node(0, self.n_triangles), 0, self.n_triangles)]
        while stack:
            node, s, e = stack.pop()
            if e - s <= self.leaf_size:
                continue
            idx = order[s:e]
            extent = centroid[idx].max(axis=0) - centroid[idx].min(axis=0)
            axis = int(np.argmax(extent))
            mid = (s + e) // 2
            part = np.argpartition(centroid[idx, axis], mid - s)
            order[s:e] = idx[part]
            l_node = new_node(s, mid)
            r_node = new_node(mid, e)
            left[node], right[node] = l_node, r_node
            count[node] = 0
            stack.append((l_node, s, mid))
            stack.append((r_node, mid, e))

        self.order = order
        self.node_lo = np.array(lo)
        self.node_hi = np.array(hi)
        self.node_left = np.array(left)
        self.node_right = np.array(right)
        self.node_start = np.array(start)
        self.node_count = np.array(count)

    def _box_d2(self, p, node):
        d = np.maximum(np.maximum(self.node_lo[node] - p, 0.0), p - self.node_hi[node])
        return float(d @ d)

    def _leaf(self, node):
        s = self.node_start[node]
        return self.order[s:s + self.node_count[node]]

    def nearest(self, p):
        """Exact nearest point on the mesh: ``(point, distance, face, bary)``."""
        p = np.asarray(p, float)
        best = (math.inf, None, None, None)
        stack = [0]
        while stack:
            node = stack.pop()
            if self._box_d2(p, node) >= best[0]:
                continue
            if self.node_left[node] < 0:
                tris = self._leaf(node)
                pts, d2, bary = closest_point_on_triangles(p, self._A[tris], self._B[tris], self._C[tris])
                k = int(np.argmin(d2))
                if d2[k] < best[0]:
                    best = (float(d2[k]), pts[k], int(tris[k]), bary[k])
                continue
            l, r = self.node_left[node], self.node_right[node]
            dl, dr = self._box_d2(p, l), self._box_d2(p, r)
            # push the farther child first so the nearer is explored first
            if dl <= dr:
                stack.extend((r, l))
            else:
                stack.extend((l, r))
        d2, pt, face, bary = best
        return pt, math.sqrt(d2), face, bary

    def within(self, p, radius):
        """Closest points on every triangle within ``radius`` of ``p``."""
        p = np.asarray(p, float)
        r2 = radius * radius
        hits = []
        stack = [0]
        while stack:
            node = stack.pop()
            if self._box_d2(p, node) > r2:
                continue
            if self.node_left[node] < 0:
                tris = self._leaf(node)
                pts, d2, bary = closest_point_on_triangles(p, self._A[tris], self._B[tris], self._C[tris])
                for k in np.nonzero(d2 <= r2)[0]:
                    hits.append((pts[k], math.sqrt(d2[k]), int(tris[k]), bary[k]))
                continue
            stack.extend((self.node_left[node], self.node_right[node]))
        hits.sort(key=lambda h: h[1])
        return hits

    def brute_nearest(self, p):
        """O(n) scan over all triangles (reference for the hierarchy)."""
        pts, d2, bary = closest_point_on_triangles(np.asarray(p, float), self._A, self._B, self._C)
        k = int(np.argmin(d2))
        return pts[k], math.sqrt(d2[k]), k, bary[k]

    def face_uv(self, face, bary):
        if self.uv is None:
            return None
        return bary @ self.uv[self.faces[face]]

    def vertex_normals(self):
        n = np.cross(self._B - self._A, self._C - self._A)  # area weighted
        out = np.zeros_like(self.vertices)
        for j in range(3):
            np.add.at(out, self.faces[:, j], n)
        norm = np.linalg.norm(out, axis=1, keepdims=True)
        return out / np.where(norm > 0, norm, 1.0)

    def edge_lengths(self):
        e = np.concatenate([self._B - self._A, self._C - self._B, self._A - self._C])
        return np.linalg.norm(e, axis=1)

    def check_bounds(self):
        """True when every node box contains all triangles below it."""
        tri_lo = np.minimum(np.minimum(self._A, self._B), self._C)
        tri_hi = np.maximum(np.maximum(self._A, self._B), self._C)
        seen = np.zeros(self.n_triangles, dtype=bool)
        stack = [(0, self.node_lo[0], self.node_hi[0])]
        while stack:
            node, plo, phi = stack.pop()
            lo, hi = self.node_lo[node], self.node_hi[node]
            if np.any(lo < plo) or np.any(hi > phi):
                return False
            if self.node_left[node] < 0:
                tris = self._leaf(node)
                if np.any(tri_lo[tris] < lo) or np.any(tri_hi[tris] > hi):
                    return False
                seen[tris] = True
            else:
                stack.append((self.node_left[node], lo, hi))
                stack.append((self.node_right[node], lo, hi))
        return bool(seen.all())


def grid_faces(nu, nv):
    """Two triangles per cell of an ``nu x nv`` vertex grid (row-major in u)."""
    i, j = np.meshgrid(np.arange(nu - 1), np.arange(nv - 1), indexing="ij")
    a = (i * nv + j).ravel()
    b = a + nv
    c = b + 1
    d = a + 1
    return np.concatenate([np.stack([a, b, c], 1), np.stack([a, c, d], 1)])


def mesh_from_patch(patch, nu, nv, domain=None, leaf_size=8):
    """Triangulate ``patch`` on an ``nu x nv`` grid over ``domain``."""
    (u0, u1), (v0, v1) = domain or patch.domain
    U, V = np.meshgrid(np.linspace(u0, u1, nu), np.linspace(v0, v1, nv), indexing="ij")
    verts = patch.position(U, V).reshape(-1, 3)
    uv = np.stack([U.ravel(), V.ravel()], axis=1)
    return MeshIndex(verts, grid_faces(nu, nv), uv=uv, leaf_size=leaf_size)


def write_obj(path, vertices, faces, header=None):
    lines = []
    if header:
        lines.extend(f"# {h}" for h in header.splitlines())
    lines.extend("v %.17g %.17g %.17g" % tuple(v) for v in np.asarray(vertices, float))
    lines.extend("f %d %d %d" % tuple(f + 1) for f in np.asarray(faces, int))
    Path(path).write_text("\n".join(lines) + "\n")


def read_obj(path):
    verts, faces = [], []
    for line in Path(path).read_text().splitlines():
        parts = line.split()
        if not parts or parts[0].startswith("#"):
            continue
        if parts[0] == "v":
            verts.append([float(x) for x in parts[1:4]])
        elif parts[0] == "f":
            idx = [int(p.split("/")[0]) for p in parts[1:]]
            idx = [i - 1 if i > 0 else len(verts) + i for i in idx]
            # fan-triangulate polygons
            for k in range(1, len(idx) - 1):
                faces.append([idx[0], idx[k], idx[k + 1]])
    return np.array(verts, dtype=float).reshape(-1, 3), np.array(faces, dtype=np.int64).reshape(-1, 3)


def load_mesh(path, leaf_size=8):
    v, f = read_obj(path)
    return MeshIndex(v, f, leaf_size=leaf_size)
