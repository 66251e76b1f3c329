"""Pointwise certificates for the barrier u = g(t_N) restricted to a surface M.

For every probe q of M the certificate records the signed distance t of
phi(q) to N, the curvatures of each nearest foot, the Hessian eigenvalues of
F = g o t and two independent evaluations of the Laplacian of u on M:

* intrinsic: Laplace-Beltrami of q -> g(t_z(phi(q))) by Richardson-extrapolated
  central differences in the parameters of M, where t_z is the distance to
  the sheet of N through the foot z (the smooth support function at q);
* extrinsic: Tr_{T_q M} Hess F + <grad F, H_M>, with H_M the mean curvature
  vector of M.

When several feet tie (cut locus) every foot is evaluated and the worst
margin is kept.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from ..errors import ContractViolation, DomainError, OrientationError
from ..surfgeo.distance import project_to_patch, signed_distance
from ..surfgeo.forms import fundamental_forms
from .profile import BarrierProfile, cmc_rhs, hessian_eigenvalues, hessian_matrix, subspace_trace

MINIMAL_TOL = 1e-6
AGREEMENT_RTOL = 2e-4


@dataclass
class BarrierCertificate:
    probe: tuple
    point: list
    t: float = math.nan
    k1: float = math.nan
    k2: float = math.nan
    mu1: float = math.nan
    mu2: float = math.nan
    mu3: float = math.nan
    trace_lb: float = math.nan
    intrinsic_laplacian: float = math.nan
    extrinsic_laplacian: float = math.nan
    agreement: float = math.nan
    laplacian_margin: float = math.nan
    extrinsic_margin: float = math.nan
    delta: float = 1e-4
    mu_relax: float = math.nan
    c: float = math.nan
    eps: float = math.nan
    u: float = math.nan
    H_M: float = math.nan
    H_N: float = math.nan
    multiplicity: int = 0
    status: str = "skipped"
    reason: str = ""
    rhs: Optional[float] = None
    lam: Optional[float] = None
    lambda_margin: Optional[float] = None

    @property
    def verdict(self):
        return self.status

    @property
    def passed(self):
        return self.status == "pass"

    def record(self):
        d = asdict(self)
        d["probe"] = list(self.probe)
        return d


FIELDS = [f for f in BarrierCertificate.__dataclass_fields__]


# --- numerical Laplace-Beltrami ------------------------------------------------

_OFFSETS = [(0, 0)]
for _k in (1, 2):
    _OFFSETS += [(_k, 0), (-_k, 0), (0, _k), (0, -_k), (_k, _k), (_k, -_k), (-_k, _k), (-_k, -_k)]


def laplace_beltrami_fd(M, u0, v0, fun, h):
    """Laplace-Beltrami of ``fun`` composed with ``M`` at (u0, v0).

    ``fun`` maps an (k, 3) array of points to k values. Derivatives use
    central differences at steps h and 2h combined by Richardson
    extrapolation (fourth order); the Christoffel term uses the jets of M.
    """
    du = np.array([o[0] for o in _OFFSETS], float) * h
    dv = np.array([o[1] for o in _OFFSETS], float) * h
    pts = M.position(u0 + du, v0 + dv)
    f = dict(zip(_OFFSETS, np.asarray(fun(pts), float)))

    def rich(a, b):
        return (4 * a - b) / 3

    f0 = f[(0, 0)]
    fu = rich((f[(1, 0)] - f[(-1, 0)]) / (2 * h), (f[(2, 0)] - f[(-2, 0)]) / (4 * h))
    fv = rich((f[(0, 1)] - f[(0, -1)]) / (2 * h), (f[(0, 2)] - f[(0, -2)]) / (4 * h))
    fuu = rich((f[(1, 0)] - 2 * f0 + f[(-1, 0)]) / h**2, (f[(2, 0)] - 2 * f0 + f[(-2, 0)]) / (4 * h * h))
    fvv = rich((f[(0, 1)] - 2 * f0 + f[(0, -1)]) / h**2, (f[(0, 2)] - 2 * f0 + f[(0, -2)]) / (4 * h * h))
    fuv = rich((f[(1, 1)] - f[(1, -1)] - f[(-1, 1)] + f[(-1, -1)]) / (4 * h * h),
               (f[(2, 2)] - f[(2, -2)] - f[(-2, 2)] + f[(-2, -2)]) / (16 * h * h))

    xu, xv = M.first(u0, v0)
    xuu, xuv, xvv = M.second(u0, v0)
    g = np.array([[xu @ xu, xu @ xv], [xu @ xv, xv @ xv]])
    ginv = np.linalg.inv(g)
    grad = ginv @ np.array([fu, fv])
    grad3 = grad[0] * xu + grad[1] * xv
    hess = np.array([[fuu - xuu @ grad3, fuv - xuv @ grad3], [fuv - xuv @ grad3, fvv - xvv @ grad3]])
    return float(np.sum(ginv * hess))


def _tangent_basis(xu, xv):
    e1 = xu / np.linalg.norm(xu)
    w = xv - (xv @ e1) * e1
    return np.stack([e1, w / np.linalg.norm(w)])


def _support_distance(N, foot_uv, foot_pt, side_normal):
    """Signed distance to the sheet of N through a foot, as a function of points."""
    def t_of(points):
        out = np.empty(len(points))
        for i, y in enumerate(points):
            closed = N.closest_uvs(y)
            if closed is not None:
                cands = [N.position(*uv) for uv in closed]
                pt = min(cands, key=lambda p: np.linalg.norm(p - foot_pt))
            else:
                _, pt, _, _ = project_to_patch(N, y, foot_uv)
            d = float(np.linalg.norm(y - pt))
            out[i] = d if (y - pt) @ side_normal >= 0 else -d
        return out
    return t_of


# --- certificates --------------------------------------------------------------


def _probe_geometry(M, uv):
    ff = fundamental_forms(M, uv[0], uv[1])
    return ff


def _certify_one(M, N, uv, profile, delta, orientation, mesh, h, mode, cmc=None):
    uv = (float(uv[0]), float(uv[1]))
    ffM = _probe_geometry(M, uv)
    y = np.asarray(ffM.position, float)
    cert = BarrierCertificate(uv, y.tolist(), delta=delta, c=profile.c, eps=profile.eps,
                              mu_relax=delta / (2 * profile.c), H_M=float(ffM.H))
    try:
        q = signed_distance(N, y, orientation=orientation, mesh=mesh, eps=profile.eps)
    except DomainError as exc:
        cert.reason = f"distance failed: {exc}"
        return cert, None
    cert.t = float(q.t)
    cert.multiplicity = q.multiplicity
    cert.k1, cert.k2 = q.k1, q.k2
    HN = [f.k1 + f.k2 for f in q.feet]
    cert.H_N = float(min(HN))
    if cmc is not None:
        inf_HN, sup_HM = cmc
        cert.lam = inf_HN - sup_HM
        cert.rhs = cmc_rhs(profile.c, cert.t, inf_HN, sup_HM)
    if not (0 < 2 * q.t < profile.eps):
        cert.reason = f"outside the tube 0 < 2t < eps (t={q.t:.6g}, eps={profile.eps:.6g})"
        return cert, q
    if mode == "minimal" and abs(ffM.H) > MINIMAL_TOL:
        cert.reason = f"M is not minimal here (|H_M| = {abs(ffM.H):.3g})"
        return cert, q

    cert.u = float(profile.g(q.t))
    W = _tangent_basis(ffM.xu, ffM.xv)
    Hvec = ffM.H * ffM.normal
    gp = float(profile.dg(q.t))
    worst = None
    for foot in q.feet:
        mu1, mu2, mu3 = hessian_eigenvalues(profile, q.t, foot.k1, foot.k2)
        Q = hessian_matrix(profile, q.t, foot.normal, foot.d1, foot.d2, foot.k1, foot.k2)
        extrinsic = subspace_trace(Q, W) + gp * float(foot.normal @ Hvec)
        t_fun = _support_distance(N, foot.uv, foot.point, foot.normal)
        intrinsic = laplace_beltrami_fd(M, uv[0], uv[1], lambda p: profile.g(t_fun(p)), h)
        trace_lb = mu1 + mu2
        ext_margin = trace_lb - 2 * profile.c * cert.mu_relax / (1 + 2 * profile.c * q.t)
        if mode == "minimal":
            margin = intrinsic
        else:
            margin = intrinsic - cert.rhs
        item = dict(k1=foot.k1, k2=foot.k2, mu1=mu1, mu2=mu2, mu3=mu3, trace_lb=trace_lb,
                    intrinsic_laplacian=intrinsic, extrinsic_laplacian=extrinsic,
                    agreement=abs(intrinsic - extrinsic) / max(abs(extrinsic), np.abs(Q).max()),
                    laplacian_margin=margin, extrinsic_margin=ext_margin)
        key = min(margin, ext_margin) if mode == "minimal" else margin
        if worst is None or key < worst[0]:
            worst = (key, item)
    for k, v in worst[1].items():
        setattr(cert, k, float(v))
    if mode == "minimal":
        ok = cert.laplacian_margin >= -delta and cert.extrinsic_margin >= -delta
    else:
        ok = cert.laplacian_margin >= -delta
        cert.lambda_margin = cert.intrinsic_laplacian - cert.lam * cert.u
    cert.status = "pass" if ok else "fail"
    if q.ambiguous:
        cert.reason = f"cut-locus point: {q.multiplicity} feet evaluated, worst kept"
    return cert, q


def _resolve_profile(N, profile, c, eps):
    if profile is not None:
        return profile
    cN = N.curvature_bound() if c is None else c
    LN = N.gauss_bound() or 0.0
    if cN is None:
        raise ContractViolation("curvature bound of N unknown: pass c or a profile")
    prof = BarrierProfile.from_bounds(cN, LN)
    if eps is not None:
        prof = BarrierProfile(eps, prof.c)
    return prof


def _run(fn, items, workers):
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(fn, items))
    return [fn(x) for x in items]


def certify_minimal(M, N, probes: Sequence, delta=1e-4, orientation=1, mesh=None, profile=None,
                    c=None, eps=None, h=None, workers=None) -> List[BarrierCertificate]:
    """Certificates for u = g(t_N) on a minimal surface ``M`` at parameter ``probes``.

    A probe passes when the intrinsic Laplacian is >= -delta and the extrinsic
    bound mu1 + mu2 - 2c mu_relax/(1 + 2ct) is >= -delta, mu_relax = delta/(2c).
    Probes outside the tube 0 < 2t < eps are skipped with a reason. Output
    order matches ``probes`` for any ``workers``.
    """
    prof = _resolve_profile(N, profile, c, eps)
    step = 1e-3 * M.scale if h is None else h
    return _run(lambda uv: _certify_one(M, N, uv, prof, delta, orientation, mesh, step, "minimal")[0],
                list(probes), workers)


def well_oriented(H_feet, tol=1e-9):
    """True when the mean curvature of N at every foot, measured with the normal
    pointing toward M, is non-negative (mean-curvature vector points at M)."""
    return bool(np.all(np.asarray(H_feet, float) >= -tol))


def certify_cmc(M, N, probes: Sequence, delta=1e-4, orientation=1, mesh=None, profile=None,
                c=None, eps=None, h=None, workers=None, sup_HM=None, inf_HN=None):
    """Certificates for the CMC sub-equation

        Lap_M u >= (2c/(1+2ct)) (inf H_N - sup |H_M|) - delta.

    ``inf H_N`` and ``sup |H_M|`` default to their values over the probe set.
    Raises :class:`OrientationError` if N's mean-curvature vector does not
    point toward M at some foot. Returns ``(certificates, summary)``.
    """
    prof = _resolve_profile(N, profile, c, eps)
    step = 1e-3 * M.scale if h is None else h
    probes = [(float(a), float(b)) for a, b in probes]
    HN, HM = [], []
    for uv in probes:
        ff = fundamental_forms(M, *uv)
        HM.append(abs(float(ff.H)))
        q = signed_distance(N, ff.position, orientation=orientation, mesh=mesh)
        HN.extend(f.k1 + f.k2 for f in q.feet)
    if not well_oriented(HN):
        raise OrientationError(
            f"N is not well oriented toward M: mean curvature {min(HN):.6g} < 0 at some foot "
            "(its mean curvature vector points away from M)")
    sup_val = max(HM) if sup_HM is None else sup_HM
    inf_val = min(HN) if inf_HN is None else inf_HN
    certs = _run(lambda uv: _certify_one(M, N, uv, prof, delta, orientation, mesh, step, "cmc",
                                         cmc=(inf_val, sup_val))[0], probes, workers)
    summary = {"inf_HN": inf_val, "sup_HM": sup_val, "lambda": inf_val - sup_val,
               "hypothesis_ok": inf_val - sup_val >= 0,
               "sampling": "infima and suprema over the probe set only"}
    return certs, summary


def summarize(certs: Sequence[BarrierCertificate]):
    active = [c for c in certs if c.status != "skipped"]
    margins = [c.laplacian_margin for c in active]
    agreements = [c.agreement for c in active if np.isfinite(c.agreement)]
    return {
        "n_probes": len(certs),
        "n_certified": len(active),
        "n_pass": sum(c.status == "pass" for c in certs),
        "n_fail": sum(c.status == "fail" for c in certs),
        "n_skipped": sum(c.status == "skipped" for c in certs),
        "min_margin": min(margins) if margins else None,
        "min_extrinsic_margin": min((c.extrinsic_margin for c in active), default=None),
        "max_agreement": max(agreements) if agreements else None,
        "n_cut_locus": sum(c.multiplicity > 1 for c in certs),
    }


# --- boundary comparison -------------------------------------------------------


@dataclass
class BoundaryReport:
    dist_M: float
    dist_boundary: float
    sup_interior: float
    sup_boundary: float
    gap: float
    resolution: float
    interior_exceeds: bool
    n_interior: int
    n_boundary: int
    notes: List[str] = field(default_factory=list)

    def record(self):
        return asdict(self)


def boundary_distance_report(M, N, profile: Optional[BarrierProfile] = None, n=41, n_boundary=401,
                             edges=("u0", "u1", "v0", "v1"), orientation=1, domain=None):
    """Compare distances and barrier suprema over the interior and boundary of ``M``.

    ``M`` is sampled on an ``n x n`` grid over ``domain`` (default: its own)
    and along the chosen boundary ``edges`` with ``n_boundary`` points each.
    The barrier is evaluated where 0 < t < eps. The interior supremum is
    flagged when it exceeds the boundary supremum by more than the
    resolution bound 2c * (largest sample spacing in space).
    """
    prof = profile or _resolve_profile(N, None, None, None)
    (u0, u1), (v0, v1) = domain or M.domain
    us, vs = np.linspace(u0, u1, n), np.linspace(v0, v1, n)
    U, V = np.meshgrid(us[1:-1], vs[1:-1], indexing="ij")
    interior = list(zip(U.ravel(), V.ravel()))
    bd = []
    sb = np.linspace(0, 1, n_boundary)
    for e in edges:
        if e == "u0":
            bd += [(u0, v0 + s * (v1 - v0)) for s in sb]
        elif e == "u1":
            bd += [(u1, v0 + s * (v1 - v0)) for s in sb]
        elif e == "v0":
            bd += [(u0 + s * (u1 - u0), v0) for s in sb]
        elif e == "v1":
            bd += [(u0 + s * (u1 - u0), v1) for s in sb]
        else:
            raise ValueError(f"unknown boundary edge {e!r}")

    def tvals(uvs):
        pts = M.position(np.array([p[0] for p in uvs]), np.array([p[1] for p in uvs]))
        return np.array([signed_distance(N, y, orientation=orientation).t for y in pts])

    t_int, t_bd = tvals(interior), tvals(bd)

    def sup_u(t):
        ok = (t > 0) & (t < prof.eps)
        return float(np.max(prof.g(t[ok]))) if ok.any() else -math.inf

    s_int, s_bd = sup_u(t_int), sup_u(t_bd)
    grid = M.position(*np.meshgrid(us, vs, indexing="ij"))
    spacing = max(np.linalg.norm(np.diff(grid, axis=0), axis=-1).max(),
                  np.linalg.norm(np.diff(grid, axis=1), axis=-1).max())
    resolution = 2 * prof.c * spacing
    all_t = np.concatenate([t_int, t_bd])
    gap = s_int - s_bd
    rep = BoundaryReport(float(np.min(np.abs(all_t))), float(np.min(np.abs(t_bd))), s_int, s_bd,
                         float(gap), float(resolution), bool(gap > resolution), len(interior), len(bd))
    rep.notes.append(f"boundary edges sampled: {','.join(edges)}; grid {n}x{n}")
    return rep
