import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from halfspace.errors import BudgetExceeded, DomainError
from halfspace.stochastic import (BMPath, RngSpec, default_step, neighborhood_hits, path_visits, plane_immersion,
                                  recurrence_stat, sample_paths, stats_table, time_change, transient_toy_lam2)
from halfspace.surfgeo import Plane
from halfspace.weierstrass import erf_conformal_factor

DATA = Path(__file__).parent / "data"


def _golden():
    rows = [ln.split() for ln in (DATA / "golden_path_seed42_stream7.txt").read_text().splitlines()
            if not ln.startswith("#")]
    return np.array([[float.fromhex(a), float.fromhex(b)] for a, b in rows])


def test_golden_path_bitwise():
    paths = sample_paths(RngSpec(42, 7), 1, 0.01, 1.0)
    assert paths.n_steps == 100
    np.testing.assert_array_equal(paths[0].positions, _golden())


def test_path_k_uses_stream_plus_k():
    a = sample_paths(RngSpec(42, 5), 3, 0.01, 1.0)[2]
    b = sample_paths(RngSpec(42, 7), 1, 0.01, 1.0)[0]
    assert a.stream == b.stream == 7
    np.testing.assert_array_equal(a.positions, b.positions)


def test_default_step():
    assert default_step(100.0) == pytest.approx(1e-2)


def test_endpoint_moments():
    n, T = 10_000, 4.0
    ends = sample_paths(RngSpec(1), n, 0.01, T).endpoints()
    assert np.all(np.abs(ends.mean(axis=0)) <= 3 * math.sqrt(2 * T / n))
    assert np.mean(np.sum(ends**2, axis=1)) == pytest.approx(2 * T, rel=0.05)


def test_workers_do_not_change_results():
    paths = sample_paths(RngSpec(9, 3), 64, 0.01, 5.0)
    a = recurrence_stat(paths, 1.0, 1.0, workers=1)
    b = recurrence_stat(paths, 1.0, 1.0, workers=4)
    np.testing.assert_array_equal(a.visits, b.visits)
    np.testing.assert_array_equal(a.last_visit_time, b.last_visit_time)
    np.testing.assert_array_equal(paths.endpoints(1), paths.endpoints(4))


def test_budget_and_domain_refusals():
    with pytest.raises(BudgetExceeded):
        sample_paths(RngSpec(0), 1, 1e-8, 1.0)
    with pytest.raises(BudgetExceeded):
        sample_paths(RngSpec(0), 10_000, 1e-5, 10.0)
    with pytest.raises(DomainError):
        sample_paths(RngSpec(0), 1, 0.0, 1.0)
    with pytest.raises(DomainError):
        RngSpec(-1)


# --- recurrence ------------------------------------------------------------------


def test_path_visits_counts_separated_visits():
    x = np.array([0.0, 0.5, 2.0, 2.0, 2.0, 0.3, 3.0, 3.0])
    path = BMPath(0, 1.0, 7.0, np.column_stack([x, np.zeros_like(x)]))
    v = path_visits(path, 1.0, 1.5)
    assert v.visits == 2
    assert v.last_visit_time == 5.0
    assert v.revisit_after_half
    far = BMPath(0, 1.0, 2.0, np.array([[5.0, 0.0], [6.0, 0.0], [7.0, 0.0]]))
    assert path_visits(far, 1.0, 1.0).visits == 0


def test_huge_disk_gives_full_revisit_fraction():
    rec = recurrence_stat(sample_paths(RngSpec(3), 50, 0.01, 10.0), disk_radius=1e6)
    assert rec.revisit_fraction == 1.0


def test_step_refinement_changes_revisit_fraction_within_noise():
    n = 600
    a = recurrence_stat(sample_paths(RngSpec(11), n, 0.02, 20.0)).revisit_fraction
    b = recurrence_stat(sample_paths(RngSpec(12), n, 0.005, 20.0)).revisit_fraction
    p = (a + b) / 2
    assert abs(a - b) <= 4 * math.sqrt(2 * p * (1 - p) / n) + 0.02


def test_three_dimensional_control_decays():
    fr = [recurrence_stat(sample_paths(RngSpec(5), 400, 0.01 * math.sqrt(T / 10), T, dim=3)).revisit_fraction
          for T in (10.0, 40.0, 160.0)]
    assert fr[0] > fr[1] > fr[2]


# --- time change -------------------------------------------------------------------


def test_unit_metric_clock_is_time():
    p = sample_paths(RngSpec(2), 1, 0.01, 3.0)[0]
    tc = time_change(p, lambda z: np.ones(z.shape), inf_lam2=1.0)
    np.testing.assert_array_equal(tc.tau, np.concatenate([[0.0], np.cumsum(np.full(p.n_steps, 0.01))]))
    assert tc.tau[-1] == pytest.approx(p.times[-1], rel=1e-13)
    assert tc.verdict == "conservative"


@given(seed=st.integers(0, 2**32), k=st.integers(0, 20))
def test_clock_is_monotone(seed, k):
    p = sample_paths(RngSpec(seed, k), 1, 0.01, 1.0)[0]
    tc = time_change(p, lambda z: erf_conformal_factor(1.0, 5.0, z) ** 2, inf_lam2=1 / math.pi)
    assert np.all(np.diff(tc.tau) >= 0)


def test_erf_example_clock_dominates_time_over_pi():
    paths = sample_paths(RngSpec(42), 100, 0.01, 4.0)
    for p in paths:
        tc = time_change(p, lambda z: erf_conformal_factor(1.0, 5.0, z) ** 2, inf_lam2=1 / math.pi)
        assert not tc.truncated
        assert tc.verdict == "conservative"
        assert tc.tau[-1] >= p.T / math.pi * (1 - 1e-12)
        assert tc.min_lam2 >= 1 / math.pi * (1 - 1e-12)


def test_overflow_is_flagged_not_truncated():
    p = BMPath(0, 0.5, 1.0, np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]))
    tc = time_change(p, lambda z: np.array([1.0, np.inf]), inf_lam2=0.5)
    assert tc.overflow and not tc.truncated
    assert tc.tau[-1] == math.inf
    assert tc.verdict == "conservative"
    bad = time_change(p, lambda z: np.array([1.0, np.nan]), inf_lam2=0.5)
    assert bad.truncated and bad.verdict == "inconclusive"
    assert len(bad.tau) == 2


def test_transient_toy_clock_plateaus():
    paths = sample_paths(RngSpec(4), 200, 0.01, 100.0)
    ratios = [time_change(p, transient_toy_lam2).plateau_ratio for p in paths]
    taus = [time_change(p, transient_toy_lam2) for p in list(paths)[:5]]
    assert all(t.verdict == "inconclusive" for t in taus)
    # most of the clock accumulates early; the second half adds little
    assert np.median(ratios) < 0.05


# --- neighbourhood hits -------------------------------------------------------------


def test_parallel_planes_never_hit_thin_tubes():
    hs = neighborhood_hits(sample_paths(RngSpec(0), 50, 0.01, 10.0), plane_immersion(1.0), Plane(), [0.4, 0.2, 0.1])
    assert hs.frequencies == [0.0, 0.0, 0.0]
    np.testing.assert_allclose(hs.min_positive_t, 1.0)


def test_hit_frequencies_nested_and_growing():
    N = Plane((3.0, 0.0, 0.0), normal=(1.0, 0.0, 0.0))
    eps = [0.4, 0.2, 0.1]
    freqs = []
    for T in (10.0, 40.0, 160.0):
        hs = neighborhood_hits(sample_paths(RngSpec(8), 300, 0.01 * math.sqrt(T / 10), T),
                               plane_immersion(0.0), N, eps, orientation=-1)
        assert hs.frequencies[0] >= hs.frequencies[1] >= hs.frequencies[2]
        freqs.append(hs.frequencies[0])
    assert freqs[0] < freqs[1] < freqs[2]


def test_stats_table_rows():
    paths = sample_paths(RngSpec(6), 5, 0.01, 2.0)
    rows = stats_table(paths, lam2=lambda z: np.ones(z.shape), immersion=plane_immersion(1.0), N=Plane())
    assert [r.stream for r in rows] == [0, 1, 2, 3, 4]
    for r in rows:
        assert r.tau_T == pytest.approx(2.0, rel=1e-12)
        assert r.min_tN == pytest.approx(1.0)
