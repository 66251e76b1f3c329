"""Monte Carlo probes of planar Brownian motion and its conformal time change.

Brownian motion on a conformally parametrized surface with metric
lambda^2 |dz|^2 is planar Brownian motion run on the clock
tau(s) = int_0^s lambda^2(B_r) dr. Paths are Euler sums of Gaussian
increments; path k draws from its own Philox stream derived from
(seed, stream + k), so every path is reproducible on its own and results do
not depend on how paths are scheduled across workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence

import numpy as np

from .errors import BudgetExceeded, DomainError

MAX_STEPS_PER_PATH = 10_000_000
MAX_TOTAL_STEPS = 2_000_000_000


@dataclass(frozen=True)
class RngSpec:
    seed: int
    stream: int = 0

    def __post_init__(self):
        if not (0 <= int(self.seed) < 2**64):
            raise DomainError("seed must be a 64-bit unsigned integer")

    def generator(self, k=0) -> np.random.Generator:
        """Generator of path ``k`` (stream index ``stream + k``)."""
        ss = np.random.SeedSequence(int(self.seed), spawn_key=(int(self.stream) + int(k),))
        return np.random.Generator(np.random.Philox(ss))


def default_step(T):
    return 1e-3 * math.sqrt(T)


@dataclass
class BMPath:
    stream: int
    h: float
    T: float
    positions: np.ndarray          # (n_steps + 1, dim), starts at the origin
    tau: Optional[np.ndarray] = None

    @property
    def times(self):
        return self.h * np.arange(len(self.positions))

    @property
    def n_steps(self):
        return len(self.positions) - 1

    def as_complex(self):
        return self.positions[:, 0] + 1j * self.positions[:, 1]


class PathEnsemble:
    """Lazily generated ensemble of independent Brownian paths.

    Indexing generates path ``k`` from its own stream; nothing is cached, so
    ensembles far larger than memory can be streamed.
    """

    def __init__(self, rng: RngSpec, n_paths: int, h: float, T: float, dim: int = 2):
        self.rng = rng
        self.n_paths = int(n_paths)
        self.h = float(h)
        self.T = float(T)
        self.dim = int(dim)
        self.n_steps = int(round(T / h))

    def __len__(self):
        return self.n_paths

    def __getitem__(self, k) -> BMPath:
        if not 0 <= k < self.n_paths:
            raise IndexError(k)
        gen = self.rng.generator(k)
        inc = gen.standard_normal((self.n_steps, self.dim)) * math.sqrt(self.h)
        pos = np.zeros((self.n_steps + 1, self.dim))
        np.cumsum(inc, axis=0, out=pos[1:])
        return BMPath(self.rng.stream + k, self.h, self.T, pos)

    def __iter__(self):
        for k in range(self.n_paths):
            yield self[k]

    def map(self, fn: Callable[[BMPath], object], workers: Optional[int] = None) -> list:
        """``[fn(path_k) for k]`` in path order, optionally on a thread pool."""
        if workers and workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as ex:
                return list(ex.map(lambda k: fn(self[k]), range(self.n_paths)))
        return [fn(self[k]) for k in range(self.n_paths)]

    def endpoints(self, workers=None):
        return np.array(self.map(lambda p: p.positions[-1], workers))


def sample_paths(rng: RngSpec, n_paths: int, h: float, T: float, dim: int = 2,
                 max_steps=MAX_STEPS_PER_PATH, max_total=MAX_TOTAL_STEPS) -> PathEnsemble:
    """Ensemble of ``n_paths`` discretized Brownian motions from the origin.

    Refuses with :class:`BudgetExceeded` when T/h or the total step count is
    beyond budget.
    """
    if not (h > 0 and T > 0 and n_paths > 0):
        raise DomainError("need h > 0, T > 0 and n_paths > 0")
    steps = T / h
    if steps > max_steps:
        raise BudgetExceeded(f"T/h = {steps:.3g} exceeds the per-path budget {max_steps:.3g}")
    if steps * n_paths > max_total:
        raise BudgetExceeded(f"{steps * n_paths:.3g} total steps exceed the budget {max_total:.3g}")
    return PathEnsemble(rng, n_paths, h, T, dim)


# --- recurrence --------------------------------------------------------------


@dataclass
class PathVisits:
    stream: int
    visits: int
    last_visit_time: float
    revisit_after_half: bool


@dataclass
class RecurrenceStats:
    n_paths: int
    disk_radius: float
    revisit_gap: float
    streams: np.ndarray
    visits: np.ndarray
    last_visit_time: np.ndarray
    revisit_after_half: np.ndarray
    T: float

    @property
    def revisit_fraction(self):
        return float(np.mean(self.revisit_after_half))


def path_visits(path: BMPath, radius, gap) -> PathVisits:
    """Distinct visits of one path to the disk of ``radius`` about the origin.

    A new visit starts at an in-disk sample more than ``gap`` time after the
    previous in-disk sample.
    """
    r2 = np.sum(path.positions**2, axis=1)
    idx = np.nonzero(r2 <= radius * radius)[0]
    if idx.size == 0:
        return PathVisits(path.stream, 0, math.nan, False)
    times = idx * path.h
    visits = 1 + int(np.count_nonzero(np.diff(times) > gap))
    last = float(times[-1])
    return PathVisits(path.stream, visits, last, bool(last > path.T / 2))


def recurrence_stat(paths: PathEnsemble, disk_radius=1.0, revisit_gap=1.0, workers=None) -> RecurrenceStats:
    if revisit_gap <= 0:
        raise DomainError("revisit_gap must be positive")
    res = paths.map(lambda p: path_visits(p, disk_radius, revisit_gap), workers)
    return RecurrenceStats(
        len(res), disk_radius, revisit_gap,
        np.array([r.stream for r in res]), np.array([r.visits for r in res]),
        np.array([r.last_visit_time for r in res]), np.array([r.revisit_after_half for r in res]), paths.T)


# --- time change ---------------------------------------------------------------


@dataclass
class TimeChange:
    tau: np.ndarray
    verdict: str                  # "conservative" or "inconclusive"
    truncated: bool
    overflow: bool
    min_lam2: float
    plateau_ratio: float          # (tau(T) - tau(T/2)) / tau(T)


def time_change(path: BMPath, lam2: Callable, inf_lam2: Optional[float] = None) -> TimeChange:
    """Clock tau(s) = int_0^s lambda^2(B_r) dr by the left-endpoint rule.

    ``lam2`` maps complex parameters to lambda^2. The verdict is
    "conservative" when ``inf_lam2 > 0`` is supplied (a bound certified by the
    caller) and tau(T) >= T inf_lam2; otherwise "inconclusive".

    A value of +inf is an overflow of a finite but huge lambda^2; the clock
    saturates at +inf and ``overflow`` is set. NaN or negative values are
    evaluation failures: the clock is truncated there and ``truncated`` is set.
    """
    z = path.as_complex()[:-1]
    with np.errstate(over="ignore", invalid="ignore"):
        vals = np.asarray(lam2(z), dtype=float)
    bad = np.isnan(vals) | (vals < 0)
    truncated = bool(bad.any())
    if truncated:
        vals = vals[:int(np.argmax(bad))]
    overflow = bool(np.isposinf(vals).any())
    with np.errstate(over="ignore"):
        tau = np.concatenate([[0.0], np.cumsum(vals * path.h)])
    min_lam2 = float(vals.min()) if vals.size else math.nan
    verdict = "inconclusive"
    if inf_lam2 is not None and inf_lam2 > 0 and not truncated:
        # the same floating sum for the constant inf_lam2 keeps the check exact
        floor = float(np.cumsum(np.full(vals.size, inf_lam2 * path.h))[-1]) if vals.size else 0.0
        if tau[-1] >= floor:
            verdict = "conservative"
    half = tau[len(tau) // 2]
    plateau = math.nan
    if 0 < tau[-1] < math.inf:
        plateau = float((tau[-1] - half) / tau[-1])
    return TimeChange(tau, verdict, truncated, overflow, min_lam2, plateau)


# --- neighbourhood hits --------------------------------------------------------


def signed_distances(N, points, orientation=1):
    """Signed distances of many points to ``N`` with fast paths for planes and spheres."""
    from .surfgeo import Cylinder, Plane, Sphere, signed_distance

    P = np.asarray(points, float)
    if isinstance(N, Plane):
        return orientation * ((P - N.origin) @ N.n)
    if isinstance(N, Sphere):
        return orientation * (np.linalg.norm(P - N.center, axis=-1) - N.R)
    if isinstance(N, Cylinder):
        return orientation * (np.hypot(P[..., 0], P[..., 1]) - N.R)
    return np.array([signed_distance(N, y, orientation=orientation).t for y in P.reshape(-1, 3)]).reshape(P.shape[:-1])


@dataclass
class HitStats:
    eps_list: List[float]
    frequencies: List[float]
    min_positive_t: np.ndarray
    min_t: np.ndarray
    streams: np.ndarray


def neighborhood_hits(paths: PathEnsemble, immersion: Callable, N, eps_list: Sequence[float],
                      orientation=1, stride=1, workers=None) -> HitStats:
    """Fraction of paths whose image under ``immersion`` enters {0 < t_N < eps}.

    ``immersion`` maps complex parameters to points of R^3. Per path the
    smallest positive distance m is recorded, and the path hits eps iff m < eps,
    so the frequencies are nonincreasing as eps decreases.
    """
    def one(p):
        z = p.as_complex()[::stride]
        t = signed_distances(N, immersion(z), orientation)
        pos = t[t > 0]
        return (float(pos.min()) if pos.size else math.inf, float(t.min()), p.stream)

    res = paths.map(one, workers)
    m = np.array([r[0] for r in res])
    freqs = [float(np.mean(m < e)) for e in eps_list]
    return HitStats(list(eps_list), freqs, m, np.array([r[1] for r in res]), np.array([r[2] for r in res]))


def plane_immersion(height=0.0):
    """The plane z = height parametrized by x + iy."""
    def f(z):
        z = np.asarray(z, dtype=complex)
        return np.stack([z.real, z.imag, np.full(z.shape, float(height))], axis=-1)
    return f


def transient_toy_lam2(z):
    """lambda^2 for the control metric lambda = exp(-|z|^2)."""
    return np.exp(-2 * np.abs(z) ** 2)


# --- per-path table ------------------------------------------------------------


@dataclass
class PathRow:
    stream: int
    visits: int
    last_visit_time: float
    tau_T: float
    min_tN: float


def stats_table(paths: PathEnsemble, disk_radius=1.0, revisit_gap=1.0, lam2: Optional[Callable] = None,
                immersion: Optional[Callable] = None, N=None, orientation=1, workers=None) -> List[PathRow]:
    """One row per path with visit counts, clock value and distance to N."""
    def one(p):
        v = path_visits(p, disk_radius, revisit_gap)
        tau_T = time_change(p, lam2).tau[-1] if lam2 is not None else math.nan
        min_t = math.nan
        if immersion is not None and N is not None:
            min_t = float(signed_distances(N, immersion(p.as_complex()), orientation).min())
        return PathRow(p.stream, v.visits, v.last_visit_time, float(tau_T), min_t)

    return paths.map(one, workers)
