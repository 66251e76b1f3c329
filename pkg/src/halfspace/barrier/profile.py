"""Log barrier profile, Hessian eigenvalues and the pointwise estimates built on them.

The profile is g(t) = log((2 + eps c) / (2 + 4 c t)), so that g(eps/4) = 0,
g' = -2c/(1 + 2ct) and g'' = (g')^2. Composed with a signed distance t to a
surface, F = g(t) has Hessian

    Hess F = g'' nu nu^T - g' sum_i kappa_i^t d_i d_i^T,

with nu = grad t and kappa_i^t the parallel curvatures along the principal
directions d_i. Its eigenvalues are mu_i = -g' kappa_i^t and mu_3 = g''.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import ContractViolation, DomainError, FocalPointError
from ..surfgeo.distance import tubular_radius


@dataclass(frozen=True)
class BarrierProfile:
    eps: float
    c: float

    def __post_init__(self):
        if not (self.eps > 0 and self.c > 0):
            raise ContractViolation("barrier profile needs eps > 0 and c > 0")
        if 2 * self.eps * self.c > 1 + 1e-12:
            raise ContractViolation(f"2 eps c = {2 * self.eps * self.c!r} exceeds 1")

    @classmethod
    def from_bounds(cls, c, Lam=0.0, margin=1e-3, flat_c=1.0):
        """Profile on the largest admissible tube for curvature bounds ``c`` and ``Lam``.

        A flat surface (c = Lam = 0) uses ``flat_c`` as its curvature constant,
        since any positive number bounds zero curvature.
        """
        if c == 0:
            c = flat_c
        return cls(tubular_radius(c, Lam, margin=margin), c)

    def g(self, t):
        return np.log((2 + self.eps * self.c) / (2 + 4 * self.c * np.asarray(t, float)))

    def dg(self, t):
        return -2 * self.c / (1 + 2 * self.c * np.asarray(t, float))

    def d2g(self, t):
        return 4 * self.c**2 / (1 + 2 * self.c * np.asarray(t, float)) ** 2

    def in_tube(self, t):
        t = np.asarray(t, float)
        return (t > 0) & (2 * t < self.eps)


def _parallel(k, t):
    denom = 1.0 - t * k
    if np.any(np.abs(denom) <= 1e-12):
        raise FocalPointError(float(np.ravel(1.0 / np.asarray(k))[0]), "offset reaches a focal point")
    return k / denom


def hessian_eigenvalues(profile: BarrierProfile, t, k1, k2, check_tube=True):
    """Eigenvalues (mu1, mu2, mu3) of Hess(g o t) at signed distance ``t``.

    ``k1, k2`` are principal curvatures of the foot with respect to the normal
    pointing toward the query point. mu1 <= mu2 are the tangential eigenvalues
    (sorted), mu3 = g''(t) the normal one. Works elementwise on arrays.
    """
    t = np.asarray(t, float)
    k1 = np.asarray(k1, float)
    k2 = np.asarray(k2, float)
    if check_tube and np.any((t <= 0) | (2 * t > profile.eps * (1 + 1e-12))):
        raise ContractViolation("need 0 < 2t <= eps")
    c = profile.c
    bad = t * np.maximum(k1, k2) >= 1
    if np.any(bad):
        kmax = np.broadcast_to(np.maximum(k1, k2), bad.shape)[bad]
        raise FocalPointError(float(np.ravel(1 / kmax)[0]), "t kappa >= 1: at or past a focal point")
    gp = profile.dg(t)
    scale = 2 * c / (1 + 2 * c * t)
    a = -gp * _parallel(k1, t)
    b = -gp * _parallel(k2, t)
    mu3 = profile.d2g(t)
    # the same numbers through the closed forms
    a2 = scale * k1 / (1 - t * k1)
    b2 = scale * k2 / (1 - t * k2)
    mu3b = 4 * c * c / (1 + 2 * c * t) ** 2
    if not (np.allclose(a, a2, rtol=1e-12, atol=0) and np.allclose(b, b2, rtol=1e-12, atol=0)
            and np.allclose(mu3, mu3b, rtol=1e-12, atol=0)):
        raise AssertionError("eigenvalue identities failed")
    mu1, mu2 = np.minimum(a, b), np.maximum(a, b)
    if mu1.ndim == 0:
        return float(mu1), float(mu2), float(mu3)
    return mu1, mu2, mu3


def minimal_trace(c, t, kappa):
    """mu1 + mu2 for principal curvatures (-kappa, kappa): (2c/(1+2ct)) 2 t kappa^2/(1 - t^2 kappa^2)."""
    return 2 * c / (1 + 2 * c * t) * 2 * t * kappa**2 / (1 - t * t * kappa**2)


def hessian_matrix(profile: BarrierProfile, t, nu, d1, d2, k1, k2):
    """Hess F as a 3x3 matrix from the foot frame (nu toward the point)."""
    gp = float(profile.dg(t))
    m1 = -gp * float(_parallel(k1, t))
    m2 = -gp * float(_parallel(k2, t))
    m3 = float(profile.d2g(t))
    nu, d1, d2 = (np.asarray(x, float) for x in (nu, d1, d2))
    return m3 * np.outer(nu, nu) + m1 * np.outer(d1, d1) + m2 * np.outer(d2, d2)


def subspace_trace(Q, W, tol=1e-10):
    """Trace of the symmetric form ``Q`` restricted to span of the rows of ``W``.

    ``W`` is a (2, 3) array of orthonormal rows (a (3, 2) array of columns is
    accepted too).
    """
    Q = np.asarray(Q, float)
    W = np.asarray(W, float)
    if W.shape == (3, 2):
        W = W.T
    if Q.shape != (3, 3) or W.shape != (2, 3):
        raise ContractViolation("expected a 3x3 form and a basis of two vectors in R^3")
    if not np.allclose(Q, Q.T, rtol=0, atol=1e-12 * max(1.0, np.abs(Q).max())):
        raise ContractViolation("Q must be symmetric")
    if np.abs(W @ W.T - np.eye(2)).max() > tol:
        raise ContractViolation("W is not orthonormal")
    return float(np.einsum("ij,jk,ik->", W, Q, W))


def lambda_threshold(gamma, H):
    """lambda = gamma H^2 / (4 (2 - gamma H)) for 0 < gamma H < 2."""
    if not (0 < gamma * H < 2):
        raise DomainError("need 0 < gamma H < 2")
    return gamma * H * H / (4 * (2 - gamma * H))


def cmc_rhs(c, t, inf_HN, sup_HM):
    """Right-hand side (2c/(1+2ct)) (inf H_N - sup |H_M|) of the CMC sub-equation."""
    return 2 * c / (1 + 2 * c * t) * (inf_HN - sup_HM)


# --- slice (product ambient) estimate ------------------------------------------


@dataclass
class SliceEstimateInput:
    n: int
    gp: float
    gpp: float
    c: float
    mu_relax: float
    theta: Sequence[float]
    kt: Sequence[float]

    def __post_init__(self):
        if self.n not in (2, 3, 4):
            raise ContractViolation("slice estimate is provided for n in {2, 3, 4}")
        if len(self.theta) != self.n or len(self.kt) != self.n:
            raise ContractViolation("need n angles and n parallel curvatures")

    @classmethod
    def from_profile(cls, profile: BarrierProfile, t, theta, kt, delta):
        """Inputs at distance ``t`` with mu_relax = delta/2 (slice convention)."""
        return cls(len(kt), float(profile.dg(t)), float(profile.d2g(t)), profile.c, delta / 2, theta, kt)


def spherical_unit_vector(theta):
    """(lambda_1, ..., lambda_{n+1}) with lambda_{n+1} = cos theta1,
    lambda_n = sin theta1 cos theta2, ..., lambda_1 = sin theta1 ... sin theta_n."""
    theta = np.asarray(theta, float)
    n = theta.size
    lam = np.empty(n + 1)
    prod = 1.0
    for k in range(n):
        lam[n - k] = prod * math.cos(theta[k])
        prod *= math.sin(theta[k])
    lam[0] = prod
    return lam


def slice_estimate(inp: SliceEstimateInput):
    """(lower_bound, direct_value) for the slice Laplacian of g o t.

    direct_value = g' sum_i (-kt_i)(1 - lambda_i^2) + g'' (1 - lambda_{n+1}^2)
    lower_bound  = mu_relax g' + (g'' + c g') sin^2 theta1.
    The bound holds when |kt_i| <= c and sum kt_i >= -mu_relax.
    """
    kt = np.asarray(inp.kt, float)
    if np.any(np.abs(kt) > inp.c * (1 + 1e-12)):
        raise ContractViolation("parallel curvature exceeds the bound c")
    lam = spherical_unit_vector(inp.theta)
    direct = inp.gp * float(np.sum(-kt * (1 - lam[:-1] ** 2))) + inp.gpp * (1 - lam[-1] ** 2)
    s1 = math.sin(inp.theta[0])
    lower = inp.mu_relax * inp.gp + (inp.gpp + inp.c * inp.gp) * s1 * s1
    return lower, direct
