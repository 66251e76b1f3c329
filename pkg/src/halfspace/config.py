"""Run configuration: loading, validation against a fixed schema, and surface construction.

A configuration is a TOML (``.toml``) or JSON (any other suffix) document with
the blocks ``surface``, ``probe``, ``barrier``, ``stochastic`` and ``output``.
Every key has a default; unknown blocks or keys are rejected. The resolved
document (defaults filled in) is what each run echoes to
``resolved_config.json``, and feeding that file back reproduces the run.
"""

from __future__ import annotations

import copy
import json
import math
import os
import sys
from pathlib import Path

from .errors import ConfigError, DomainError

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

OUT_ENV = "HALFSPACE_OUT"

SURFACES = ("plane", "sphere", "cylinder", "catenoid", "helicoid", "paraboloid",
            "erf_example", "enneper_andrade", "weierstrass")

DEFAULTS = {
    "surface": {
        "name": "erf_example",
        "params": {},
        "f": None,
        "g": None,
        "base": [0.0, 0.0],
        "domain": None,
    },
    "probe": {
        "grid": [101, 101],
        "rays": ["pi/4", "3*pi/4", "5*pi/4", "7*pi/4"],
        "t_list": None,
        "tol": 1e-7,
        "eps_list": [0.4, 0.2, 0.1],
        "figure": True,
        "figure_x": [-3.0, 3.0, 241],
    },
    "barrier": {
        "scenario": "helicoid_catenoid",
        "delta": 1e-4,
        "eps": None,
        "h": None,
        "region": None,
        "comparison": None,
        "orientation": 1,
        "n": 41,
        "n_boundary": 401,
        "edges": ["u0", "u1", "v0", "v1"],
    },
    "stochastic": {
        "experiment": "recurrence",
        "seed": 42,
        "stream": 0,
        "n_paths": 2000,
        "h": None,
        "T": 100.0,
        "T_list": [10.0, 40.0, 160.0],
        "disk_radius": 1.0,
        "revisit_gap": 1.0,
        "lam2": "erf_example",
        "eps_list": [0.4, 0.2, 0.1],
        "hits_scenario": "crossing_plane",
        "max_steps": 10_000_000,
    },
    "output": {
        "dir": None,
        "formats": ["csv", "obj", "jsonl"],
    },
}

# the defaults of the params table depend on the surface
SURFACE_PARAMS = {
    "plane": {"origin": [0.0, 0.0, 0.0], "normal": [0.0, 0.0, 1.0]},
    "sphere": {"R": 1.0},
    "cylinder": {"R": 1.0},
    "catenoid": {"a": 1.0},
    "helicoid": {"a": 1.0, "conformal": True},
    "paraboloid": {"height": 1.0, "a": 0.5},
    "erf_example": {"r1": 1.0, "r2": 5.0},
    "enneper_andrade": {"r1": math.sqrt(5.0), "r2": 1.0, "d": None},
    "weierstrass": {},
}

SURFACE_DOMAINS = {
    "plane": [[-1.0, 1.0], [-1.0, 1.0]],
    "sphere": [[1e-3, math.pi - 1e-3], [-math.pi, math.pi]],
    "cylinder": [[-math.pi, math.pi], [-2.0, 2.0]],
    "catenoid": [[-math.pi, math.pi], [-1.5, 1.5]],
    "helicoid": [[-math.pi, math.pi], [-1.5, 1.5]],
    "paraboloid": [[-1.0, 1.0], [-1.0, 1.0]],
    "erf_example": [[-2.0, 2.0], [-2.0, 2.0]],
    "enneper_andrade": [[-2.0, 2.0], [-2.0, 2.0]],
    "weierstrass": [[-1.0, 1.0], [-1.0, 1.0]],
}


def _merge(block, given, where):
    if not isinstance(given, dict):
        raise ConfigError(f"[{where}] must be a table")
    unknown = sorted(set(given) - set(block))
    if unknown:
        raise ConfigError(f"unknown key(s) in [{where}]: {', '.join(unknown)}")
    out = copy.deepcopy(block)
    out.update(copy.deepcopy(given))
    return out


def resolve_surface_block(block, where="surface"):
    """Fill surface defaults (params and domain) for a surface table."""
    block = _merge(DEFAULTS["surface"], block, where)
    name = block["name"]
    if name not in SURFACES:
        raise ConfigError(f"[{where}] unknown surface {name!r}; expected one of {', '.join(SURFACES)}")
    params = _merge(SURFACE_PARAMS[name], block["params"] or {}, f"{where}.params")
    if name == "enneper_andrade" and params["d"] is None:
        params["d"] = params["r1"] - params["r2"]
    block["params"] = params
    if name == "weierstrass" and not (block["f"] and block["g"]):
        raise ConfigError(f"[{where}] raw Weierstrass data needs both f and g expressions")
    if block["domain"] is None:
        block["domain"] = copy.deepcopy(SURFACE_DOMAINS[name])
    return block


def resolve(doc: dict) -> dict:
    """Validated configuration with every default filled in."""
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a table")
    unknown = sorted(set(doc) - set(DEFAULTS))
    if unknown:
        raise ConfigError(f"unknown block(s): {', '.join(unknown)}")
    out = {k: _merge(DEFAULTS[k], doc.get(k, {}), k) for k in DEFAULTS if k != "surface"}
    out["surface"] = resolve_surface_block(doc.get("surface", {}))
    comp = out["barrier"]["comparison"]
    if comp is not None:
        out["barrier"]["comparison"] = resolve_surface_block(comp, "barrier.comparison")
    st = out["stochastic"]
    if st["h"] is None:
        st["h"] = 1e-3 * math.sqrt(float(st["T"]))
    return out


def load(path) -> dict:
    """Parse a TOML or JSON file (by suffix) without resolving it."""
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        if p.suffix.lower() == ".toml":
            return tomllib.loads(text)
        return json.loads(text)
    except (ValueError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc


def output_dir(cfg, override=None) -> Path:
    d = override or cfg["output"]["dir"] or os.environ.get(OUT_ENV) or "halfspace_out"
    return Path(d)


def dump_resolved(cfg, path):
    Path(path).write_text(json.dumps(cfg, indent=2, sort_keys=True) + "\n")


def parse_angle(x) -> float:
    """An angle given as a number or a real constant expression such as ``"3*pi/4"``."""
    if isinstance(x, (int, float)):
        return float(x)
    from .cnum import parse

    try:
        val = complex(parse(str(x))(0j))
    except Exception as exc:
        raise ConfigError(f"cannot read angle {x!r}: {exc}") from exc
    if val.imag != 0:
        raise ConfigError(f"angle {x!r} is not real")
    return val.real


# --- surfaces ------------------------------------------------------------------


def _domain(block):
    (u0, u1), (v0, v1) = block["domain"]
    return ((float(u0), float(u1)), (float(v0), float(v1)))


def build_surface(block):
    """SurfacePatch for a resolved surface block."""
    from . import surfgeo as sg
    from . import weierstrass as ws

    name, p, dom = block["name"], block["params"], _domain(block)
    try:
        if name == "plane":
            return sg.Plane(p["origin"], p["normal"], domain=dom)
        if name == "sphere":
            return sg.Sphere(p["R"])
        if name == "cylinder":
            return sg.Cylinder(p["R"], height=dom[1])
        if name == "catenoid":
            return sg.Catenoid(p["a"], v_range=dom[1])
        if name == "helicoid":
            return sg.Helicoid(p["a"], conformal=bool(p["conformal"]), domain=dom)
        if name == "paraboloid":
            return sg.Paraboloid(p["height"], p["a"], domain=dom)
        if name == "erf_example":
            return ws.erf_patch(p["r1"], p["r2"], domain=dom)
        if name == "enneper_andrade":
            return ws.EnneperSurface(ws.EnneperParams(p["r1"], p["r2"], p["d"]), domain=dom)
        from .cnum import parse

        data = ws.WeierstrassData(parse(block["f"]), parse(block["g"]), complex(*block["base"]),
                                  name="weierstrass", params={"f": block["f"], "g": block["g"]})
        return ws.WeierstrassPatch(data, dom)
    except (DomainError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"invalid surface {name!r}: {exc}") from exc
