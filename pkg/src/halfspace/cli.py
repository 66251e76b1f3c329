"""Command line entry point: ``halfspace <command> [--config PATH] [--seed N] [--out DIR] [--threads N]``.

Commands write their files into the output directory together with
``resolved_config.json``. Exit codes: 0 on success, 1 when a certification
fails, 2 on usage or configuration errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import config as cfgmod
from .barrier import (BarrierProfile, boundary_distance_report, certify_cmc, certify_minimal, summarize,
                      write_certificates_csv, write_certificates_jsonl)
from .barrier.io import _clean, fmt17
from .errors import BudgetExceeded, ConfigError, HalfspaceError, OrientationError

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([fmt17(x) for x in r])


def write_json(path, obj):
    Path(path).write_text(json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        obj = obj.item()
    return _clean(obj)


def _grid(spec, default):
    a, b, n = spec if spec is not None else default
    return np.linspace(float(a), float(b), int(n))


# --- surface ---------------------------------------------------------------------


def _residual(M, name, U, V, xu, xv):
    if name == "enneper_andrade":
        return M.minimality_residual(U + 1j * V)
    if name in ("erf_example", "weierstrass"):
        E, F, G = (np.sum(a * b, -1) for a, b in ((xu, xu), (xu, xv), (xv, xv)))
        return (np.abs(E - G) + 2 * np.abs(F)) / (E + G)
    return None


def jet_table(M, name, U, V):
    """Rows (u, v, x, y, z, lambda, K, H[, residual], status) on the given points.

    lambda is (det I)^(1/4), the conformal factor for conformal patches.
    Points where evaluation fails get a status message and empty values.
    """
    from .surfgeo.forms import shape_from_jets
    from .weierstrass import gauss_curvature

    with np.errstate(all="ignore"):
        X = M.position(U, V)
        xu, xv = M.first(U, V)
        xuu, xuv, xvv = M.second(U, V)
        E, F, G = (np.sum(a * b, -1) for a, b in ((xu, xu), (xu, xv), (xv, xv)))
        det = E * G - F * F
        finite = np.all(np.isfinite(X), -1) & np.isfinite(det)
        for arr in (xuu, xuv, xvv):
            finite &= np.all(np.isfinite(arr), -1)
        good = finite & (det > 1e-14 * M.scale**4)
        H = np.full(U.shape, np.nan)
        K = np.full(U.shape, np.nan)
        if good.any():
            _, _, _, _, _, Hg, Kg, _, _ = shape_from_jets(xu[good], xv[good], xuu[good], xuv[good], xvv[good],
                                                         scale=M.scale)
            H[good], K[good] = Hg, Kg
            if name in ("erf_example", "weierstrass"):
                K[good] = gauss_curvature(M.data, (U + 1j * V)[good])
        lam = det ** 0.25
        res = _residual(M, name, U, V, xu, xv)
    rows = []
    for i in range(U.size):
        if good[i] and np.isfinite(H[i]) and np.isfinite(K[i]):
            vals = [X[i, 0], X[i, 1], X[i, 2], lam[i], K[i], H[i]]
            status = "ok"
        else:
            vals = [None] * 6
            status = "non-finite value" if not finite[i] else "degenerate metric"
        row = [U[i], V[i]] + [None if v is None else float(v) for v in vals]
        if res is not None:
            row.append(float(res[i]) if status == "ok" else None)
        rows.append(row + [status])
    header = ["u", "v", "x", "y", "z", "lambda", "K", "H"] + (["residual"] if res is not None else []) + ["status"]
    return header, rows


def cmd_surface(cfg, out, workers):
    from .surfgeo.mesh import grid_faces, write_obj

    sb = cfg["surface"]
    M = cfgmod.build_surface(sb)
    nu, nv = (int(n) for n in cfg["probe"]["grid"])
    (u0, u1), (v0, v1) = sb["domain"]
    U, V = np.meshgrid(np.linspace(u0, u1, nu), np.linspace(v0, v1, nv), indexing="ij")
    header, rows = jet_table(M, sb["name"], U.ravel(), V.ravel())
    formats = cfg["output"]["formats"]
    n_bad = sum(r[-1] != "ok" for r in rows)
    if "csv" in formats:
        write_csv(out / "jets.csv", header, rows)
    if "obj" in formats:
        verts = np.array([[np.nan] * 3 if r[2] is None else r[2:5] for r in rows], float)
        verts = np.where(np.isfinite(verts), verts, 0.0)
        write_obj(out / "mesh.obj", verts, grid_faces(nu, nv),
                  header=f"surface {sb['name']}\ngrid {nu}x{nv}\nfailed vertices set to origin: {n_bad}")
    summary = {"surface": sb["name"], "points": len(rows), "failed": n_bad}
    if cfg["probe"]["figure"] and sb["name"] in ("erf_example", "weierstrass", "enneper_andrade"):
        xs = _grid(cfg["probe"]["figure_x"], None)
        with np.errstate(all="ignore"):
            P = M.position(xs, xs)
        write_csv(out / "figure.csv", ["x", "chi_x", "chi_y", "chi_z"],
                  [[x, *(None if not np.isfinite(c) else float(c) for c in p)] for x, p in zip(xs, P)])
    if "residual" in header:
        vals = [r[header.index("residual")] for r in rows if r[-1] == "ok"]
        summary["max_residual"] = max(vals) if vals else None
    write_json(out / "summary.json", summary)
    print(f"surface {sb['name']}: {len(rows)} points, {n_bad} failed -> {out}")
    return EXIT_OK


# --- limit -----------------------------------------------------------------------


def _position_fn(M, name, params):
    from .weierstrass import closed_form_chi, immerse

    if name == "erf_example":
        return lambda z: closed_form_chi(params["r1"], params["r2"], z)
    if name == "weierstrass":
        return lambda z: immerse(M.data, z)
    return lambda z: M.position(np.real(z), np.imag(z))


def cmd_limit(cfg, out, workers):
    from .weierstrass import erf_limit_points, limit_probe

    sb = cfg["surface"]
    M = cfgmod.build_surface(sb)
    fn = _position_fn(M, sb["name"], sb["params"])
    pr = cfg["probe"]
    thetas = [cfgmod.parse_angle(x) for x in pr["rays"]]
    golden = {}
    if sb["name"] == "erf_example" and sb["params"]["r2"] > sb["params"]["r1"]:
        golden = erf_limit_points(sb["params"]["r1"], sb["params"]["r2"])
    rows, trace, report = [], [], []
    for th in thetas:
        res = limit_probe(fn, th, pr["t_list"], tol=pr["tol"])
        k = 4 * th / math.pi
        q = golden.get(int(round(k)) % 8) if abs(k - round(k)) < 1e-12 else None
        lim = res.limit if res.limit is not None else [None] * 3
        err = float(np.max(np.abs(res.limit - q))) if (q is not None and res.limit is not None) else None
        rows.append([th, res.verdict, *lim, res.rate, str(res.truncated).lower(), len(res.ts),
                     float(res.steps[-1]) if res.steps.size else None,
                     *(q if q is not None else [None] * 3), err])
        trace.extend([th, t, *p] for t, p in zip(res.ts, res.points))
        report.append(f"theta={th:.6f} {res.verdict}" + (f" error={err:.3g}" if err is not None else ""))
    write_csv(out / "limit.csv", ["theta", "verdict", "x", "y", "z", "rate", "truncated", "n_t", "last_step",
                                  "golden_x", "golden_y", "golden_z", "golden_error"], rows)
    write_csv(out / "limit_trace.csv", ["theta", "t", "x", "y", "z"], trace)
    print("\n".join(report))
    return EXIT_OK


# --- certify ---------------------------------------------------------------------


def certify_scenario(cfg):
    """(M, N, probes, mode, orientation) for the configured barrier scenario.

    Scenario regions (``barrier.region`` = {"u": [a, b, n], "v": [a, b, n]}):
    helicoid_catenoid  u is the helicoid angle, v the radial offset from the catenoid
    parallel_planes    Cartesian grid on the upper plane
    tilted_plane       Cartesian grid on the tilted plane
    cmc_spheres        (polar, azimuth) grid on the inner sphere
    cmc_disk           (radius, angle) grid on the flat disk inside the unit sphere
    custom             parameter grid on [surface] against [barrier.comparison]
    """
    from .surfgeo import Catenoid, Helicoid, Plane, Sphere

    b = cfg["barrier"]
    scen = b["scenario"]
    reg = b["region"] or {}
    unknown = set(reg) - {"u", "v"}
    if unknown:
        raise ConfigError(f"unknown key(s) in barrier.region: {', '.join(sorted(unknown))}")

    def grid(du, dv):
        us, vs = _grid(reg.get("u"), du), _grid(reg.get("v"), dv)
        return us, vs

    if scen == "helicoid_catenoid":
        a = float(cfg["surface"]["params"].get("a", 1.0)) if cfg["surface"]["name"] in ("helicoid", "catenoid") else 1.0
        M, N = Helicoid(a, conformal=False), Catenoid(a, v_range=(-2.0, 2.0))
        us, offs = grid((-0.6, 0.6, 30), (0.01, 0.2, 20))
        probes = [(u, a * math.cosh(u) + o) for u in us for o in offs]
        return M, N, probes, "minimal", 1
    if scen == "parallel_planes":
        M, N = Plane((0, 0, 0.1)), Plane()
        us, vs = grid((-1, 1, 11), (-1, 1, 11))
        return M, N, [(u, v) for u in us for v in vs], "minimal", 1
    if scen == "tilted_plane":
        al = 0.3
        M = Plane((0, 0, 0.15), normal=(0, -math.sin(al), math.cos(al)), e1=(1, 0, 0))
        us, vs = grid((-1, 1, 11), (-0.4, 0.3, 11))
        return M, Plane(), [(u, v) for u in us for v in vs], "minimal", 1
    if scen == "cmc_spheres":
        us, vs = grid((0.3, math.pi - 0.3, 6), (-3.0, 3.0, 6))
        return Sphere(0.5), Sphere(1.0), [(u, v) for u in us for v in vs], "cmc", -1
    if scen == "cmc_disk":
        rs, angs = grid((0.85, 0.98, 8), (-3.0, 3.0, 8))
        probes = [(r * math.cos(t), r * math.sin(t)) for r in rs for t in angs]
        return Plane(), Sphere(1.0), probes, "cmc", -1
    if scen == "custom":
        if b["comparison"] is None:
            raise ConfigError("scenario 'custom' needs [barrier.comparison]")
        M = cfgmod.build_surface(cfg["surface"])
        N = cfgmod.build_surface(b["comparison"])
        (u0, u1), (v0, v1) = cfg["surface"]["domain"]
        us, vs = grid((u0, u1, 20), (v0, v1, 20))
        mode = "minimal" if M.mean_curvature_is_zero() else "cmc"
        return M, N, [(u, v) for u in us for v in vs], mode, int(b["orientation"])
    raise ConfigError(f"unknown barrier scenario {scen!r}")


def _profile(N, b):
    c = N.curvature_bound()
    if c is None:
        return None
    prof = BarrierProfile.from_bounds(c, N.gauss_bound() or 0.0)
    if b["eps"] is not None:
        prof = BarrierProfile(float(b["eps"]), prof.c)
    return prof


def cmd_certify(cfg, out, workers):
    b = cfg["barrier"]
    M, N, probes, mode, orientation = certify_scenario(cfg)
    prof = _profile(N, b)
    kw = dict(delta=float(b["delta"]), orientation=orientation, profile=prof, h=b["h"], workers=workers)
    extra = {"scenario": b["scenario"], "mode": mode}
    if mode == "minimal":
        certs = certify_minimal(M, N, probes, **kw)
    else:
        try:
            certs, cmc = certify_cmc(M, N, probes, **kw)
        except OrientationError as exc:
            write_json(out / "summary.json", {**extra, "refused": str(exc)})
            print(f"certification refused: {exc}")
            return EXIT_FAIL
        extra.update(cmc)
    formats = cfg["output"]["formats"]
    summary = summarize(certs)
    summary.update(extra)
    if "jsonl" in formats:
        write_certificates_jsonl(out / "certificates.jsonl", certs, extra)
    if "csv" in formats:
        write_certificates_csv(out / "certificates.csv", certs)
    ok = summary["n_fail"] == 0 and summary["n_certified"] > 0 and extra.get("hypothesis_ok", True)
    summary["passed"] = ok
    write_json(out / "summary.json", summary)
    print(f"{b['scenario']}: {summary['n_pass']} pass, {summary['n_fail']} fail, "
          f"{summary['n_skipped']} skipped; min margin {summary['min_margin']}"
          + ("" if extra.get("hypothesis_ok", True) else "; hypothesis inf H_N >= sup |H_M| violated"))
    return EXIT_OK if ok else EXIT_FAIL


# --- stochastic ------------------------------------------------------------------


def _lam2(name):
    from .stochastic import transient_toy_lam2
    from .weierstrass import erf_conformal_factor

    if name == "unit":
        return (lambda z: np.ones(np.shape(z))), 1.0
    if name == "erf_example":
        # lambda sqrt(pi) >= 1 everywhere for this surface
        return (lambda z: erf_conformal_factor(1.0, 5.0, z) ** 2), 1 / math.pi
    if name == "toy_transient":
        return transient_toy_lam2, None
    raise ConfigError(f"unknown lam2 {name!r}; expected unit, erf_example or toy_transient")


def _hits_pair(name):
    from .stochastic import plane_immersion
    from .surfgeo import Plane

    if name == "parallel_planes":
        return plane_immersion(1.0), Plane()
    if name == "crossing_plane":
        return plane_immersion(0.0), Plane((3.0, 0.0, 0.0), normal=(1.0, 0.0, 0.0))
    raise ConfigError(f"unknown hits scenario {name!r}; expected parallel_planes or crossing_plane")


def cmd_stochastic(cfg, out, workers):
    from . import stochastic as st

    s = cfg["stochastic"]
    rng = st.RngSpec(int(s["seed"]), int(s["stream"]))
    exp = s["experiment"]
    lam2, inf_lam2 = _lam2(s["lam2"])
    T, h, n = float(s["T"]), float(s["h"]), int(s["n_paths"])

    def ensemble(T_, dim=2):
        h_ = h * math.sqrt(T_ / T)
        return st.sample_paths(rng, n, h_, T_, dim=dim, max_steps=s["max_steps"])

    summary = {"experiment": exp, "seed": rng.seed, "stream": rng.stream, "n_paths": n, "h": h, "T": T}
    trend = None
    immersion = N = None
    if exp == "recurrence":
        paths = ensemble(T)
        rec = st.recurrence_stat(paths, s["disk_radius"], s["revisit_gap"], workers)
        summary.update(revisit_fraction=rec.revisit_fraction, mean_visits=float(np.mean(rec.visits)))
    elif exp == "control3d":
        trend = []
        for T_ in s["T_list"]:
            rec = st.recurrence_stat(ensemble(float(T_), dim=3), s["disk_radius"], s["revisit_gap"], workers)
            trend.append([float(T_), "revisit_fraction", None, rec.revisit_fraction])
        fr = [r[3] for r in trend]
        summary["trend_nonincreasing"] = all(b <= a for a, b in zip(fr, fr[1:]))
        paths = ensemble(T, dim=3)
    elif exp == "time_change":
        paths = ensemble(T)
        tcs = paths.map(lambda p: st.time_change(p, lam2, inf_lam2), workers)
        summary.update(
            lam2=s["lam2"], inf_lam2=inf_lam2,
            n_conservative=sum(t.verdict == "conservative" for t in tcs),
            n_truncated=sum(t.truncated for t in tcs), n_overflow=sum(t.overflow for t in tcs),
            min_tau_over_T=min(float(t.tau[-1]) for t in tcs) / paths.T,
            mean_plateau_ratio=float(np.nanmean([t.plateau_ratio for t in tcs])))
    elif exp == "hits":
        immersion, N = _hits_pair(s["hits_scenario"])
        trend = []
        for T_ in s["T_list"]:
            hs = st.neighborhood_hits(ensemble(float(T_)), immersion, N, s["eps_list"], workers=workers)
            trend.extend([float(T_), "hit_frequency", e, f] for e, f in zip(hs.eps_list, hs.frequencies))
        paths = ensemble(T)
    else:
        raise ConfigError(f"unknown stochastic experiment {exp!r}")

    rows = st.stats_table(paths, s["disk_radius"], s["revisit_gap"], lam2, immersion, N, workers=workers)
    write_csv(out / "stats.csv", ["stream", "visits", "last_visit_time", "tau_T", "min_tN"],
              [[r.stream, r.visits, r.last_visit_time, r.tau_T, r.min_tN] for r in rows])
    if trend is not None:
        write_csv(out / "trend.csv", ["T", "metric", "eps", "value"], trend)
    write_json(out / "summary.json", summary)
    print(json.dumps(_jsonable(summary), sort_keys=True))
    return EXIT_OK


# --- report-boundary -------------------------------------------------------------


def boundary_scenario(cfg):
    from .surfgeo import Paraboloid, Plane

    b = cfg["barrier"]
    scen = b["scenario"]
    if scen == "strip_parallel":
        return Plane((0, 0, 0.1), domain=((-1, 1), (0, 1))), Plane(), b["edges"]
    if scen == "tilted_strip":
        al = 0.2
        M = Plane((0, 0, 0.02), normal=(0, -math.sin(al), math.cos(al)), e1=(1, 0, 0), domain=((-1, 1), (0, 1)))
        return M, Plane(), ["v0"]
    if scen == "paraboloid_control":
        return Paraboloid(0.05, 0.2, domain=((-1, 1), (-1, 1))), Plane(), b["edges"]
    if scen == "custom":
        if b["comparison"] is None:
            raise ConfigError("scenario 'custom' needs [barrier.comparison]")
        return cfgmod.build_surface(cfg["surface"]), cfgmod.build_surface(b["comparison"]), b["edges"]
    raise ConfigError(f"unknown boundary scenario {scen!r}; expected strip_parallel, tilted_strip, "
                      "paraboloid_control or custom")


def cmd_report_boundary(cfg, out, workers):
    b = cfg["barrier"]
    M, N, edges = boundary_scenario(cfg)
    rep = boundary_distance_report(M, N, _profile(N, b), n=int(b["n"]), n_boundary=int(b["n_boundary"]),
                                   edges=tuple(edges), orientation=int(b["orientation"]))
    rec = rep.record()
    write_csv(out / "boundary.csv", ["quantity", "value"],
              [[k, v] for k, v in rec.items() if k != "notes"])
    write_json(out / "summary.json", {"scenario": b["scenario"], **rec})
    print(f"{b['scenario']}: dist(M,N)={rep.dist_M:.6g} dist(dM,N)={rep.dist_boundary:.6g} "
          f"sup_int u={rep.sup_interior:.6g} sup_bd u={rep.sup_boundary:.6g} "
          f"interior exceeds: {rep.interior_exceeds}")
    return EXIT_OK


COMMANDS = {
    "surface": cmd_surface,
    "limit": cmd_limit,
    "certify": cmd_certify,
    "stochastic": cmd_stochastic,
    "report-boundary": cmd_report_boundary,
}


def build_parser():
    ap = argparse.ArgumentParser(prog="halfspace", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", help="TOML or JSON run configuration")
    ap.add_argument("--seed", type=int, help="override stochastic.seed")
    ap.add_argument("--out", help=f"output directory (default: output.dir, ${cfgmod.OUT_ENV}, ./halfspace_out)")
    ap.add_argument("--threads", type=int, default=1, help="worker threads (affects speed only)")
    return ap


def run(argv=None):
    args = build_parser().parse_args(argv)
    doc = cfgmod.load(args.config) if args.config else {}
    if args.seed is not None:
        doc.setdefault("stochastic", {})["seed"] = args.seed
    cfg = cfgmod.resolve(doc)
    out = cfgmod.output_dir(cfg, args.out)
    out.mkdir(parents=True, exist_ok=True)
    cfg["output"]["dir"] = str(out)
    cfgmod.dump_resolved(cfg, out / "resolved_config.json")
    return COMMANDS[args.command](cfg, out, args.threads)


def main(argv=None):
    try:
        return run(argv)
    except SystemExit as exc:
        # argparse usage errors
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    except (ConfigError, BudgetExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except HalfspaceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
