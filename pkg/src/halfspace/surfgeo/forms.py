"""First and second fundamental forms and principal curvatures.

Curvature convention: with unit normal ``n``, II_ij = <x_ij, n> and the
principal curvatures are the eigenvalues of I^{-1} II. A sphere with outward
normal therefore has kappa = -1/R, and H = kappa1 + kappa2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DomainError

DEGENERATE_METRIC = 1e-14


@dataclass
class FundamentalForms:
    """Jet data at one or many parameter points (arrays broadcast together)."""

    position: np.ndarray
    xu: np.ndarray
    xv: np.ndarray
    normal: np.ndarray
    I: np.ndarray          # (..., 2, 2)
    II: np.ndarray         # (..., 2, 2)
    k1: np.ndarray
    k2: np.ndarray
    H: np.ndarray
    K: np.ndarray
    d1: np.ndarray         # unit principal direction for k1 in R^3
    d2: np.ndarray

    @property
    def det_I(self):
        return self.I[..., 0, 0] * self.I[..., 1, 1] - self.I[..., 0, 1] ** 2


def _dot(a, b):
    return np.sum(a * b, axis=-1)


def _unit(a):
    return a / np.linalg.norm(a, axis=-1, keepdims=True)


def shape_from_jets(xu, xv, xuu, xuv, xvv, normal=None, toward=None, scale=1.0):
    """Principal curvature data from raw partial derivatives.

    ``normal`` overrides the default unit(xu x xv); ``toward`` (a vector field
    or single vector) flips the normal so that <normal, toward> >= 0.
    """
    E, F, G = _dot(xu, xu), _dot(xu, xv), _dot(xv, xv)
    det = E * G - F * F
    if np.any(det <= DEGENERATE_METRIC * scale**4):
        raise DomainError("degenerate metric: det I vanishes (not an immersion here)")
    n = _unit(np.cross(xu, xv)) if normal is None else _unit(np.asarray(normal, float))
    if toward is not None:
        s = np.where(_dot(n, np.asarray(toward, float)) < 0, -1.0, 1.0)
        n = n * s[..., None]
    e, f, g = _dot(xuu, n), _dot(xuv, n), _dot(xvv, n)

    # shape operator in the orthonormal frame b1 = xu/|xu|, b2 = Gram-Schmidt(xv)
    l11 = np.sqrt(E)
    l22 = np.sqrt(det / E)
    a1 = 1.0 / l11
    a2u, a2v = -F / (E * l22), 1.0 / l22
    s11 = e * a1 * a1
    s12 = a1 * (e * a2u + f * a2v)
    s22 = e * a2u * a2u + 2 * f * a2u * a2v + g * a2v * a2v
    mean = 0.5 * (s11 + s22)
    rad = np.hypot(0.5 * (s11 - s22), s12)
    k1 = mean - rad
    k2 = mean + rad
    H = s11 + s22
    K = k1 * k2
    # eigenvector of k1 in the frame: angle of the k2 axis plus a quarter turn
    phi = 0.5 * np.arctan2(2 * s12, s11 - s22)
    c, s = np.cos(phi), np.sin(phi)
    b1 = xu / l11[..., None]
    b2 = (xv - (F / E)[..., None] * xu) / l22[..., None]
    d1 = -s[..., None] * b1 + c[..., None] * b2
    d2 = np.cross(n, d1)

    I = np.stack([np.stack([E, F], -1), np.stack([F, G], -1)], -2)
    II = np.stack([np.stack([e, f], -1), np.stack([f, g], -1)], -2)
    return I, II, n, k1, k2, H, K, d1, d2


def fundamental_forms(patch, u, v, toward=None) -> FundamentalForms:
    """Fundamental forms of ``patch`` at ``(u, v)`` (scalars or arrays).

    ``toward`` orients the normal: it is flipped wherever it points away from
    ``toward``. Raises :class:`DomainError` on a degenerate metric.
    """
    u = np.asarray(u, float)
    v = np.asarray(v, float)
    x = patch.position(u, v)
    xu, xv = patch.first(u, v)
    xuu, xuv, xvv = patch.second(u, v)
    I, II, n, k1, k2, H, K, d1, d2 = shape_from_jets(
        xu, xv, xuu, xuv, xvv, toward=toward, scale=patch.scale)
    return FundamentalForms(x, xu, xv, n, I, II, k1, k2, H, K, d1, d2)
