"""Minimal immersions from Weierstrass data and two explicit families.

For holomorphic ``f`` and meromorphic ``g`` the immersion is

    x(z) = Re int_base^z (f(1 - g^2)/2, i f(1 + g^2)/2, f g) dz

with conformal factor lambda = |f|(1 + |g|^2)/2 and Gauss curvature
K = -(4|g'| / (|f| (1 + |g|^2)^2))^2.

``erf_example(r1, r2)`` is the data f = 2/sqrt(pi) e^{r1 z^2}, g = e^{-r2 z^2},
whose coordinates are erf/erfi combinations. ``EnneperParams`` describes the
immersion (L - conj(H), Re Phi) with L = (r1 - r2) e^z,
H = -d e^{(r1/r2 - 1) z} and Phi = -4 k i e^{r1 z / (2 r2)}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .cnum import Expr, as_expr, cerf, erfi, integrate_segments
from .cnum.expr import Const, Z, exp, mul
from .errors import DomainError
from .surfgeo.forms import shape_from_jets
from .surfgeo.patch import SurfacePatch


@dataclass(frozen=True)
class WeierstrassData:
    f: Expr
    g: Expr
    base: complex = 0j
    name: str = "weierstrass"
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "f", as_expr(self.f))
        object.__setattr__(self, "g", as_expr(self.g))
        object.__setattr__(self, "base", complex(self.base))

    def integrands(self):
        f, g = self.f, self.g
        g2 = g * g
        return (0.5 * f * (1 - g2), 0.5j * f * (1 + g2), f * g)

    def derivatives(self):
        return tuple(e.diff() for e in self.integrands())


@dataclass
class SurfaceJet:
    """Position, frame and curvature of an immersion at one parameter point."""

    z: complex
    position: np.ndarray
    xu: np.ndarray
    xv: np.ndarray
    lam: float
    normal: np.ndarray
    K: float
    H: float
    meta: dict = field(default_factory=dict)

    @property
    def conformality_defect(self):
        return abs(np.linalg.norm(self.xu) - np.linalg.norm(self.xv)) + abs(float(self.xu @ self.xv))


def erf_example(r1=1.0, r2=5.0) -> WeierstrassData:
    """Weierstrass data f = (2/sqrt(pi)) e^{r1 z^2}, g = e^{-r2 z^2}."""
    _check_erf_regime(r1, r2)
    z2 = Z * Z
    f = mul(Const(2 / math.sqrt(math.pi)), exp(Const(r1) * z2))
    g = exp(Const(-r2) * z2)
    return WeierstrassData(f, g, 0j, name="erf_example", params={"r1": r1, "r2": r2})


def _check_erf_regime(r1, r2):
    if not ((r2 > r1 > 0) or (2 * r2 > r1 > r2 > 0)):
        raise DomainError(f"need r2 > r1 > 0 or 2 r2 > r1 > r2 > 0, got r1={r1}, r2={r2}")


def immerse(data: WeierstrassData, z, tol=1e-12, max_intervals=200000):
    """Coordinates of the immersion at ``z`` (scalar or array) by quadrature.

    Each component is integrated along the straight segment from the base
    point to an error below ``tol * max(1, |x(z)|)``: absolute where the
    coordinates are of order one, relative where they grow like e^{c|z|^2}
    and an absolute target would be below floating resolution.
    """
    z = np.asarray(z, dtype=complex)
    ints = list(data.integrands())
    base = np.full(z.shape, data.base)
    # one Gauss-Kronrod pass per segment gives the magnitude of the result
    coarse, _ = integrate_segments(ints, base, z, tol=np.inf, raise_on_failure=False)
    with np.errstate(invalid="ignore"):
        scale = np.maximum(1.0, np.max(np.abs(coarse), axis=-1))
    vals, _ = integrate_segments(ints, base, z, tol=tol * scale, max_intervals=max_intervals)
    return vals.real


def conformal_factor(data: WeierstrassData, z):
    return 0.5 * np.abs(data.f(z)) * (1 + np.abs(data.g(z)) ** 2)


def erf_conformal_factor(r1, r2, z):
    """lambda of the erf example as (e^{r1 X} + e^{(r1 - 2 r2) X}) / sqrt(pi), X = Re z^2.

    Far out |f| underflows while |g|^2 overflows, so the generic product
    gives 0 * inf; this form saturates to +inf instead.
    """
    z = np.asarray(z, dtype=complex)
    X = (z * z).real
    with np.errstate(over="ignore"):
        val = (np.exp(r1 * X) + np.exp((r1 - 2 * r2) * X)) / math.sqrt(math.pi)
    return float(val) if val.ndim == 0 else val


def gauss_curvature(data: WeierstrassData, z):
    """K = -(4|g'| / (|f| (1 + |g|^2)^2))^2 (non-positive)."""
    z = np.asarray(z, dtype=complex)
    f, g, dg = data.f(z), data.g(z), data.g.diff()(z)
    lam = 0.5 * np.abs(f) * (1 + np.abs(g) ** 2)
    if np.any(lam <= 0):
        raise DomainError("conformal factor vanishes (branch point of the immersion)")
    val = -(4 * np.abs(dg) / (np.abs(f) * (1 + np.abs(g) ** 2) ** 2)) ** 2
    return float(val) if val.ndim == 0 else val


def erf_curvature_closed_form(r1, r2, z):
    """Curvature of the erf example written through Re z^2 and |z|."""
    z = np.asarray(z, dtype=complex)
    X = (z * z).real
    den = (np.exp(0.5 * (r1 + r2) * X) + np.exp(-0.5 * (3 * r2 - r1) * X)) ** 2
    val = -(4 * math.sqrt(math.pi) * r2 * np.abs(z) / den) ** 2
    return float(val) if val.ndim == 0 else val


def _jet_arrays(data, z):
    phi = np.stack([e(z) for e in data.integrands()], axis=-1)
    dphi = np.stack([e(z) for e in data.derivatives()], axis=-1)
    xu, xv = phi.real, -phi.imag
    xuu, xuv, xvv = dphi.real, -dphi.imag, -dphi.real
    return xu, xv, xuu, xuv, xvv


def weierstrass_jet(data: WeierstrassData, z, tol=1e-12, position=None) -> SurfaceJet:
    """Jet at a single ``z``; the position comes from quadrature unless given."""
    z = complex(z)
    xu, xv, xuu, xuv, xvv = _jet_arrays(data, np.asarray(z))
    if position is None:
        position = immerse(data, z, tol=tol)
    I, II, n, k1, k2, H, K, d1, d2 = shape_from_jets(xu, xv, xuu, xuv, xvv)
    lam = float(np.linalg.norm(xu))
    return SurfaceJet(z, np.asarray(position, float), xu, xv, lam, n, gauss_curvature(data, z), float(H),
                      meta={"K_shape": float(K), "k1": float(k1), "k2": float(k2)})


def closed_form_chi(r1, r2, z, full_output=False):
    """Erf-example coordinates in closed form.

    With A = erfi(sqrt(r1) z)/(2 sqrt(r1)) and B = erf(s z)/(2 s), s = sqrt(2 r2 - r1),
    x1 + i x2 = conj(A) - B and x3 = Re erf(sqrt(r2 - r1) z)/sqrt(r2 - r1) (erfi form
    when r1 > r2). Saturated evaluations are returned as nan and, with
    ``full_output``, flagged in the second return value.
    """
    _check_erf_regime(r1, r2)
    z = np.asarray(z, dtype=complex)
    a = math.sqrt(r1)
    s = math.sqrt(2 * r2 - r1)
    A, ok_a = erfi(a * np.conj(z), full_output=True)
    B, ok_b = cerf(s * z, full_output=True)
    w = np.asarray(A) / (2 * a) - np.asarray(B) / (2 * s)
    if r2 > r1:
        b = math.sqrt(r2 - r1)
        C, ok_c = cerf(b * z, full_output=True)
    else:
        b = math.sqrt(r1 - r2)
        C, ok_c = erfi(b * z, full_output=True)
    x3 = np.asarray(C).real / b
    ok = np.asarray(ok_a) & np.asarray(ok_b) & np.asarray(ok_c)
    out = np.stack(np.broadcast_arrays(w.real, w.imag, x3), axis=-1)
    out = np.where(ok[..., None], out, np.nan)
    if full_output:
        return out, ok
    return out


def erf_limit_points(r1, r2):
    """The four diagonal limits of the erf example, keyed by k in theta = k pi/4."""
    _check_erf_regime(r1, r2)
    if not r2 > r1:
        raise DomainError("the diagonal limits are finite only for r2 > r1")
    p = 1 / (2 * math.sqrt(2 * r2 - r1))
    q = 1 / (2 * math.sqrt(r1))
    s = 1 / math.sqrt(r2 - r1)
    return {
        1: np.array([-p, -q, s]),
        3: np.array([p, -q, -s]),
        5: np.array([p, q, -s]),
        7: np.array([-p, q, s]),
    }


def sector_constants(r1, r2, eps):
    """(A, B, C) of the sector curvature bounds for half-width ``eps``."""
    A = 16 * math.pi * r2**2
    B = (r1 + r2) * math.cos(math.pi / 2 - 2 * eps)
    C = (3 * r2 - r1) * math.cos(math.pi / 2 - 2 * eps)
    return A, B, C


def in_diagonal_sectors(theta, eps):
    """Whether theta lies within ``eps`` of an odd multiple of pi/4."""
    theta = np.mod(theta, 2 * math.pi)
    centers = (2 * np.arange(1, 5) - 1) * math.pi / 4
    return np.any(np.abs(np.asarray(theta)[..., None] - centers) < eps, axis=-1)


# --- Enneper-type immersion ------------------------------------------------


@dataclass(frozen=True)
class EnneperParams:
    r1: float
    r2: float
    d: float
    strict: bool = False

    def __post_init__(self):
        r1, r2, d = self.r1, self.r2, self.d
        if r1 == r2 or r1 * r2 * d == 0:
            raise DomainError("need r1 != r2 and r1 r2 d != 0")
        if self.strict and not self.admissible:
            raise DomainError("parameters violate 0 < r1 < 4 r2 < 3 r1 with d = r1 - r2 > 0")

    @property
    def admissible(self):
        r1, r2, d = self.r1, self.r2, self.d
        return 0 < r1 < 4 * r2 < 3 * r1 and d > 0 and math.isclose(d, r1 - r2, rel_tol=1e-12)

    @property
    def k(self):
        r1, r2, d = self.r1, self.r2, self.d
        return math.sqrt(d / r2) * abs(r2 / r1) * abs(r1 - r2)

    def holomorphic_parts(self):
        """Expression trees (L, H, Phi) with h = Re Phi."""
        r1, r2, d = self.r1, self.r2, self.d
        L = Const(r1 - r2) * exp(Z)
        H = Const(-d) * exp(Const(r1 / r2 - 1) * Z)
        Phi = Const(-4j * self.k) * exp(Const(r1 / (2 * r2)) * Z)
        return L, H, Phi

    def metadata(self):
        ratio = self.r1 / self.r2
        return {"r1": self.r1, "r2": self.r2, "d": self.d, "admissible": self.admissible,
                "ratio_r1_r2": ratio, "ratio_irrational": "not checked"}


class EnneperSurface(SurfacePatch):
    """The immersion (L - conj(H), Re Phi) as a surface patch over (u, v)."""

    name = "enneper_andrade"

    def __init__(self, params: EnneperParams, domain=((-2.0, 2.0), (-2.0, 2.0))):
        self.params = params
        self.L, self.H, self.Phi = params.holomorphic_parts()
        self.dL, self.dH, self.dPhi = self.L.diff(), self.H.diff(), self.Phi.diff()
        self.ddL, self.ddH, self.ddPhi = self.dL.diff(), self.dH.diff(), self.dPhi.diff()
        self.domain = domain

    def _z(self, u, v):
        u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
        return u + 1j * v

    def position(self, u, v):
        z = self._z(u, v)
        X = self.L(z) - np.conj(self.H(z))
        return np.stack([X.real, X.imag, self.Phi(z).real], axis=-1)

    def first(self, u, v):
        z = self._z(u, v)
        dL, dH, dP = self.dL(z), self.dH(z), self.dPhi(z)
        Xu = dL - np.conj(dH)
        Xv = 1j * (dL + np.conj(dH))
        return (np.stack([Xu.real, Xu.imag, dP.real], -1),
                np.stack([Xv.real, Xv.imag, -dP.imag], -1))

    def second(self, u, v):
        z = self._z(u, v)
        a, b, c = self.ddL(z), self.ddH(z), self.ddPhi(z)
        Xuu = a - np.conj(b)
        Xuv = 1j * (a + np.conj(b))
        Xvv = -a + np.conj(b)
        return (np.stack([Xuu.real, Xuu.imag, c.real], -1),
                np.stack([Xuv.real, Xuv.imag, -c.imag], -1),
                np.stack([Xvv.real, Xvv.imag, -c.real], -1))

    def minimality_residual(self, z):
        z = np.asarray(z, dtype=complex)
        return np.abs(self.dL(z) * self.dH(z) - (self.dPhi(z) / 2) ** 2)

    def conformal_factor(self, z):
        z = np.asarray(z, dtype=complex)
        return np.abs(self.dL(z)) + np.abs(self.dH(z))

    def mean_curvature_is_zero(self):
        return True

    def describe(self):
        return {"name": self.name, **{k: getattr(self.params, k) for k in ("r1", "r2", "d")}}


def enneper_immersion(p: EnneperParams, z) -> SurfaceJet:
    """Jet of the Enneper-type immersion at ``z`` with the minimality residual in ``meta``."""
    surf = EnneperSurface(p)
    z = complex(z)
    u, v = z.real, z.imag
    x = surf.position(u, v)
    xu, xv = surf.first(u, v)
    xuu, xuv, xvv = surf.second(u, v)
    lam = float(surf.conformal_factor(z))
    if lam <= 0 or not np.isfinite(lam):
        raise DomainError("conformal factor vanishes or overflows")
    I, II, n, k1, k2, H, K, d1, d2 = shape_from_jets(xu, xv, xuu, xuv, xvv, scale=0.0)
    meta = {"residual": float(surf.minimality_residual(z)), **p.metadata()}
    return SurfaceJet(z, x, xu, xv, lam, n, float(K), float(H), meta)


# --- patches over Weierstrass data ----------------------------------------


class WeierstrassPatch(SurfacePatch):
    """Weierstrass data viewed as a surface patch over (u, v) = (Re z, Im z).

    Positions use ``position_fn`` when supplied (e.g. a closed form) and
    quadrature from the base point otherwise; partials are exact.
    """

    def __init__(self, data: WeierstrassData, domain=((-2.0, 2.0), (-2.0, 2.0)),
                 position_fn: Optional[Callable] = None, tol=1e-11):
        self.data = data
        self.name = data.name
        self.domain = domain
        self.position_fn = position_fn
        self.tol = tol

    def position(self, u, v):
        u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
        z = u + 1j * v
        if self.position_fn is not None:
            return self.position_fn(z)
        return immerse(self.data, z, tol=self.tol)

    def first(self, u, v):
        u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
        xu, xv, *_ = _jet_arrays(self.data, u + 1j * v)
        return xu, xv

    def second(self, u, v):
        u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
        _, _, xuu, xuv, xvv = _jet_arrays(self.data, u + 1j * v)
        return xuu, xuv, xvv

    def conformal_factor(self, z):
        return conformal_factor(self.data, z)

    def mean_curvature_is_zero(self):
        return True

    def describe(self):
        return {"name": self.name, **self.data.params}


def erf_patch(r1=1.0, r2=5.0, domain=((-2.0, 2.0), (-2.0, 2.0))):
    return WeierstrassPatch(erf_example(r1, r2), domain, position_fn=lambda z: closed_form_chi(r1, r2, z))


# --- limit probes ---------------------------------------------------------


@dataclass
class LimitProbe:
    theta: float
    ts: np.ndarray
    points: np.ndarray
    verdict: str                 # "converged" or "diverged"
    limit: Optional[np.ndarray]
    rate: Optional[float]        # fitted exponent p in |x(t_k) - x(t_{k+1})| ~ t^-p
    truncated: bool
    steps: np.ndarray            # successive differences


def default_t_list(t_max=1e8, per_decade=2):
    n = int(round(math.log10(t_max) * per_decade)) + 1
    return np.logspace(0.0, math.log10(t_max), n)


def ray_direction(theta):
    """e^{i theta} with rounding cleaned up so that axis and diagonal rays stay exact.

    On a diagonal the real and imaginary parts are made bit-identical, which
    keeps Re z^2 = 0 exactly for z = t e^{i theta} at every t.
    """
    c, s = math.cos(theta), math.sin(theta)
    if abs(c) < 1e-15:
        c = 0.0
    if abs(s) < 1e-15:
        s = 0.0
    if abs(abs(c) - abs(s)) < 1e-15:
        s = math.copysign(abs(c), s)
    return complex(c, s)


def limit_probe(surface: Callable, theta, T_list: Sequence[float] = None, tol=1e-7) -> LimitProbe:
    """Follow ``surface(t e^{i theta})`` over increasing ``T_list``.

    The verdict is "converged" when the last successive difference is below
    ``tol``; non-finite evaluations truncate the sequence and set ``truncated``.
    """
    ts = np.asarray(default_t_list() if T_list is None else T_list, dtype=float)
    if ts.size < 2 or np.any(np.diff(ts) <= 0):
        raise ValueError("T_list must be strictly increasing with at least two entries")
    direction = ray_direction(theta)
    pts = []
    truncated = False
    for t in ts:
        try:
            p = np.asarray(surface(t * direction), dtype=float)
        except (FloatingPointError, OverflowError, ArithmeticError):
            truncated = True
            break
        if not np.all(np.isfinite(p)):
            truncated = True
            break
        pts.append(p)
    pts = np.array(pts).reshape(-1, 3)
    used = ts[:len(pts)]
    steps = np.linalg.norm(np.diff(pts, axis=0), axis=1) if len(pts) > 1 else np.array([])
    converged = (not truncated) and steps.size > 0 and steps[-1] <= tol
    rate = None
    good = steps > 0
    if good.sum() >= 3:
        tail = slice(max(0, good.size - 6), good.size)
        x = np.log(used[1:][tail][good[tail]])
        y = np.log(steps[tail][good[tail]])
        if x.size >= 2:
            rate = float(-np.polyfit(x, y, 1)[0])
    return LimitProbe(float(theta), used, pts, "converged" if converged else "diverged",
                      pts[-1] if converged else None, rate, truncated, steps)
