"""Parametrized and triangulated surface geometry."""

from .distance import (Foot, TubularQuery, focal_distance, parallel_curvatures, project_to_patch,
                       signed_distance, tubular_radius)
from .forms import FundamentalForms, fundamental_forms, shape_from_jets
from .mesh import MeshIndex, closest_point_on_triangles, grid_faces, load_mesh, mesh_from_patch, read_obj, write_obj
from .patch import CallablePatch, Catenoid, Cylinder, Helicoid, Paraboloid, Plane, Sphere, SurfacePatch

__all__ = [
    "Foot", "TubularQuery", "focal_distance", "parallel_curvatures", "project_to_patch",
    "signed_distance", "tubular_radius", "FundamentalForms", "fundamental_forms", "shape_from_jets",
    "MeshIndex", "closest_point_on_triangles", "grid_faces", "load_mesh", "mesh_from_patch",
    "read_obj", "write_obj", "CallablePatch", "Catenoid", "Cylinder", "Helicoid", "Paraboloid",
    "Plane", "Sphere", "SurfacePatch",
]
