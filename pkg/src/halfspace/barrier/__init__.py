"""Barrier profile, Hessian eigenvalue bounds and pointwise certificates."""

from .certify import (BarrierCertificate, BoundaryReport, boundary_distance_report, certify_cmc,
                      certify_minimal, laplace_beltrami_fd, summarize, well_oriented)
from .io import read_certificates_jsonl, write_certificates_csv, write_certificates_jsonl
from .profile import (BarrierProfile, SliceEstimateInput, cmc_rhs, hessian_eigenvalues, hessian_matrix,
                      lambda_threshold, minimal_trace, slice_estimate, spherical_unit_vector, subspace_trace)

__all__ = [
    "BarrierCertificate", "BoundaryReport", "boundary_distance_report", "certify_cmc", "certify_minimal",
    "laplace_beltrami_fd", "summarize", "well_oriented", "read_certificates_jsonl",
    "write_certificates_csv", "write_certificates_jsonl", "BarrierProfile", "SliceEstimateInput",
    "cmc_rhs", "hessian_eigenvalues", "hessian_matrix", "lambda_threshold", "minimal_trace",
    "slice_estimate", "spherical_unit_vector", "subspace_trace",
]
