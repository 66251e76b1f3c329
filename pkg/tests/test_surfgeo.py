import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from halfspace.errors import DomainError, FocalPointError
from halfspace.surfgeo import (CallablePatch, Catenoid, Cylinder, Helicoid, MeshIndex, Paraboloid, Plane, Sphere,
                               closest_point_on_triangles, fundamental_forms, grid_faces, mesh_from_patch,
                               parallel_curvatures, project_to_patch, read_obj, signed_distance, tubular_radius,
                               write_obj)


def shape_operator_oracle(ff):
    # eigenvalues of I^{-1} II straight from numpy
    return np.sort(np.linalg.eigvals(np.linalg.solve(ff.I, ff.II)).real)


def test_sphere_cylinder_catenoid_forms():
    ff = fundamental_forms(Sphere(1.0), 0.7, 0.3)
    assert ff.k1 == pytest.approx(-1, abs=1e-13) and ff.k2 == pytest.approx(-1, abs=1e-13)
    assert ff.H == pytest.approx(-2, abs=1e-13) and ff.K == pytest.approx(1, abs=1e-13)
    ff = fundamental_forms(Cylinder(1.0), 0.4, 0.2)
    assert (ff.k1, ff.k2) == pytest.approx((-1.0, 0.0), abs=1e-14) and ff.K == pytest.approx(0, abs=1e-14)
    ff = fundamental_forms(Catenoid(1.0), 0.9, 0.0)
    assert ff.H == pytest.approx(0, abs=1e-14) and ff.K == pytest.approx(-1, abs=1e-14)


def test_degenerate_metric_refused():
    # the polar parameter of the sphere degenerates at the pole
    with pytest.raises(DomainError):
        fundamental_forms(Sphere(1.0), 0.0, 0.3)


PATCHES = [Catenoid(1.3), Helicoid(0.7), Helicoid(1.0, conformal=False), Paraboloid(0.2, 0.8), Sphere(2.0)]


@given(st.sampled_from(range(len(PATCHES))), st.floats(0.2, 1.2), st.floats(-1.0, 1.0))
def test_forms_vs_eigen_oracle(i, u, v):
    ff = fundamental_forms(PATCHES[i], u, v)
    assert ff.k1 <= ff.k2
    ref = shape_operator_oracle(ff)
    assert np.allclose([ff.k1, ff.k2], ref, rtol=1e-9, atol=1e-10)
    assert ff.H == pytest.approx(ff.k1 + ff.k2, abs=1e-10)
    assert ff.K == pytest.approx(ff.k1 * ff.k2, rel=1e-9, abs=1e-12)
    # principal directions: II(d, d) = k along unit d
    for k, d in ((ff.k1, ff.d1), (ff.k2, ff.d2)):
        a = np.linalg.lstsq(np.stack([ff.xu, ff.xv], 1), d, rcond=None)[0]
        assert a @ ff.II @ a == pytest.approx(k * (a @ ff.I @ a), abs=1e-9)


def test_minimal_patches_have_zero_mean_curvature(rng):
    for M in (Catenoid(1.0), Helicoid(1.0), Helicoid(2.0, conformal=False)):
        u, v = rng.uniform(-1, 1, 50), rng.uniform(-1, 1, 50)
        assert np.max(np.abs(fundamental_forms(M, u, v).H)) <= 1e-12


def test_fd_jets_match_analytic():
    S = Sphere(1.0)
    P = CallablePatch(S.position)
    a, b = fundamental_forms(S, 0.8, 0.4), fundamental_forms(P, 0.8, 0.4)
    assert abs(a.k1 - b.k1) <= 1e-5 and abs(a.k2 - b.k2) <= 1e-5
    P1 = CallablePatch(S.position, S.first)
    assert abs(fundamental_forms(P1, 0.8, 0.4).H - a.H) <= 1e-7


def test_signed_distance_examples():
    q = signed_distance(Plane(), (0, 0, 0.3))
    assert q.t == pytest.approx(0.3) and np.allclose(q.foot, 0)
    assert signed_distance(Plane(), (0, 0, 0.3), orientation=-1).t == pytest.approx(-0.3)
    q = signed_distance(Cylinder(1.0), (1.25, 0, 0.1))
    assert q.t == pytest.approx(0.25, abs=1e-14)
    assert (q.k1, q.k2) == pytest.approx((-1.0, 0.0), abs=1e-12)
    assert parallel_curvatures(q.k1, q.k2, q.t) == pytest.approx((-0.8, 0.0), abs=1e-12)
    q = signed_distance(Sphere(1.0), (0, 0, 0), orientation=-1)
    assert q.multiplicity == 2 and q.ambiguous


def test_offset_consistency():
    # outside a cylinder: feet curvature transported to the offset radius
    for t in (0.1, 0.3, 0.45):
        q = signed_distance(Cylinder(1.0), (0.0, 1 + t, 0.3))
        off = fundamental_forms(Cylinder(1 + t), math.pi / 2, 0.3)
        assert np.allclose(parallel_curvatures(q.k1, q.k2, q.t), (off.k1, off.k2), atol=1e-8)
    # inside a sphere with the inward orientation
    for t in (0.1, 0.3, 0.6):
        y = (1 - t) * np.array([0.6, 0.0, 0.8])
        q = signed_distance(Sphere(1.0), y, orientation=-1)
        assert q.t == pytest.approx(t, abs=1e-12)
        u = math.acos(0.8)
        off = fundamental_forms(Sphere(1 - t), u, 0.0, toward=-y)
        assert np.allclose(parallel_curvatures(q.k1, q.k2, q.t), (off.k1, off.k2), atol=1e-8)


@given(st.floats(-1.0, 1.0), st.floats(-1.0, 1.0), st.floats(0.0, 0.99))
def test_parallel_order_preserved(k1, k2, s):
    k1, k2 = min(k1, k2), max(k1, k2)
    t = s / k2 if k2 > 0 else s * 5
    a, b = parallel_curvatures(k1, k2, t)
    assert a <= b + 1e-12


def test_parallel_curvature_examples():
    assert parallel_curvatures(0.0, 0.0, 7.0) == (0.0, 0.0)
    with pytest.raises(FocalPointError) as exc:
        parallel_curvatures(1.0, 1.0, 1.0)
    assert exc.value.focal_distance == 1.0
    # approaching the focal point the curvature blows up
    assert parallel_curvatures(1.0, 1.0, 1 - 1e-9)[0] > 1e8


def test_tubular_radius():
    assert tubular_radius(1.0, 1.0) == pytest.approx(0.4995)
    assert tubular_radius(0.0, 0.0, cap=5) == 5
    assert tubular_radius(2.0, 0.5) == pytest.approx(0.25 * 0.999)
    with pytest.raises(DomainError):
        tubular_radius(0.0, 0.0)
    cat = Catenoid(1.0)
    assert tubular_radius(cat.curvature_bound(), cat.gauss_bound()) == pytest.approx(0.4995)


def test_foot_is_orthogonal_and_distance_exact(rng):
    for N in (Catenoid(1.0), Helicoid(1.0), Paraboloid(0.0, 0.5)):
        (u0, u1), (v0, v1) = N.domain
        for _ in range(15):
            u, v = rng.uniform(0.3 * u0, 0.3 * u1), rng.uniform(0.3 * v0, 0.3 * v1)
            ff = fundamental_forms(N, u, v)
            y = ff.position + rng.uniform(0.05, 0.3) * ff.normal * rng.choice([-1, 1])
            q = signed_distance(N, y)
            foot = q.feet[0]
            r = y - foot.point
            assert np.linalg.norm(r) == pytest.approx(abs(q.t), rel=1e-9)
            cosang = abs(r @ foot.normal) / np.linalg.norm(r)
            assert math.acos(min(1.0, cosang)) <= 1e-6


def test_bvh_equals_brute_force(rng):
    mesh = mesh_from_patch(Catenoid(1.0), 60, 60)
    assert mesh.n_triangles <= 10_000 and mesh.check_bounds()
    lo, hi = mesh.vertices.min(0) - 0.5, mesh.vertices.max(0) + 0.5
    for y in rng.uniform(lo, hi, size=(1000, 3)):
        _, d, _, _ = mesh.nearest(y)
        _, db, _, _ = mesh.brute_nearest(y)
        assert d == db


def test_newton_vs_fine_mesh(rng):
    # about 1e5 triangles; the brute-force scan is the oracle for the mesh distance
    N = Catenoid(1.0, v_range=(-1.0, 1.0))
    mesh = mesh_from_patch(N, 224, 224, domain=((-math.pi, math.pi), (-1.0, 1.0)))
    assert mesh.n_triangles >= 99_000
    h = mesh.edge_lengths().max()
    for _ in range(20):
        u, v = rng.uniform(-3, 3), rng.uniform(-0.7, 0.7)
        ff = fundamental_forms(N, u, v)
        y = ff.position + rng.uniform(-0.3, 0.3) * ff.normal
        _, dm, _, _ = mesh.brute_nearest(y)
        q = signed_distance(N, y, mesh=mesh)
        assert abs(abs(q.t) - dm) <= 2 * h * h


def test_mesh_mode_distance():
    mesh = mesh_from_patch(Plane(domain=((-1, 1), (-1, 1))), 5, 5)
    q = signed_distance(mesh, (0.1, 0.2, 0.4))
    assert abs(q.t) == pytest.approx(0.4) and np.isnan(q.k1)


def test_closest_point_on_triangle_regions():
    A, B, C = np.array([[0.0, 0, 0]]), np.array([[1.0, 0, 0]]), np.array([[0.0, 1, 0]])
    for p, ref in (((0.2, 0.2, 1.0), (0.2, 0.2, 0)), ((-1, -1, 0), (0, 0, 0)), ((2, -1, 0), (1, 0, 0)),
                   ((1, 1, 0), (0.5, 0.5, 0)), ((0.5, -2, 0), (0.5, 0, 0))):
        pts, d2, bary = closest_point_on_triangles(np.array(p, float), A, B, C)
        assert np.allclose(pts[0], ref) and np.allclose(bary[0] @ np.vstack([A, B, C]), ref)


def test_mesh_immutable_and_validated():
    mesh = mesh_from_patch(Plane(), 4, 4)
    with pytest.raises(ValueError):
        mesh.vertices[0, 0] = 1.0
    with pytest.raises(ValueError):
        MeshIndex(np.zeros((3, 3)), np.array([[0, 1, 3]]))


def test_obj_roundtrip(tmp_path):
    mesh = mesh_from_patch(Helicoid(1.0), 7, 5)
    p = tmp_path / "m.obj"
    write_obj(p, mesh.vertices, mesh.faces, header="helicoid")
    v, f = read_obj(p)
    np.testing.assert_array_equal(v, mesh.vertices)
    np.testing.assert_array_equal(f, mesh.faces)
    # polygons are fan triangulated
    p.write_text("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n")
    assert read_obj(p)[1].tolist() == [[0, 1, 2], [0, 2, 3]]
    assert grid_faces(3, 3).shape == (8, 3)


def test_project_to_patch_converges():
    uv, pt, d, ok = project_to_patch(Sphere(1.0), np.array([0.0, 0.0, 2.0]) + 0.1, (0.3, 0.5))
    assert ok and d == pytest.approx(np.linalg.norm([0.1, 0.1, 2.1]) - 1, abs=1e-12)
