"""G(n, q) sampling, the q sweep, and the forced-prefix bound harnesses."""
import math

import numpy as np
import pytest

from cascade_lab import (
    ForcedPrefixSpec,
    InputError,
    Topology,
    default_q_grid,
    exponential_bound,
    forced_prefix_failure,
    forced_prefix_failure_exact,
    sample_gnq,
    sustainable_correct_fraction,
    sweep_q,
)


def test_sample_gnq_endpoints():
    assert sample_gnq(5, 0.0, 1) == Topology.empty(5)
    assert sample_gnq(5, 1.0, 1) == Topology.complete(5)


def test_sample_gnq_edge_concentration():
    n, q = 10**4, 0.5
    topo = sample_gnq(n, q, 99)
    pairs = n * (n - 1) // 2
    mean, sd = pairs * q, math.sqrt(pairs * q * (1 - q))
    assert abs(topo.edge_count() - mean) < 4 * sd
    assert sample_gnq(n, q, 99).edge_count() == topo.edge_count()  # seeded


def test_exponential_bound():
    assert abs(exponential_bound(10, 0.3, 1.0) - math.exp(-3.0)) < 1e-12
    assert exponential_bound(50, 0.2, 0.5) == 1.0
    assert abs(exponential_bound(100, 0.1, 0.9) - math.exp(-4.0)) < 1e-12


def test_forced_prefix_unanimous_correct():
    spec = ForcedPrefixSpec(i=20, f=1.0)
    est = forced_prefix_failure(50, 1.0, 2 / 3, spec, reps=2000, seed=3)
    assert est.mean == 0.0
    assert forced_prefix_failure_exact(1.0, 2 / 3, spec) == 0.0


def test_forced_prefix_mc_matches_exact():
    for (i, q, f) in [(200, 0.05, 0.9), (120, 0.15, 0.75), (50, 0.3, 0.6)]:
        spec = ForcedPrefixSpec(i=i, f=f)
        exact = forced_prefix_failure_exact(q, 2 / 3, spec)
        est = forced_prefix_failure(i + 1, q, 2 / 3, spec, reps=60000, seed=17)
        assert abs(est.mean - exact) <= 3 * est.ci95_halfwidth + 1e-9


def test_forced_prefix_tail_bounds():
    spec = ForcedPrefixSpec(i=200, f=0.9)
    est = forced_prefix_failure(300, 0.05, 2 / 3, spec, reps=40000, seed=5)
    assert est.mean <= exponential_bound(200, 0.05, 0.9) + 3 * est.ci95_halfwidth
    # condition (f/(1-f))^2 >= p/(1-p) keeps the failure under p
    spec2 = ForcedPrefixSpec(i=100, f=0.6)
    assert (0.6 / 0.4) ** 2 >= 2.0
    est2 = forced_prefix_failure(200, 0.2, 2 / 3, spec2, reps=40000, seed=6)
    assert est2.mean <= 2 / 3 + 3 * est2.ci95_halfwidth


def test_forced_prefix_spec_validation():
    with pytest.raises(InputError):
        ForcedPrefixSpec(i=10, f=0.5)
    with pytest.raises(InputError):
        forced_prefix_failure(10, 0.2, 2 / 3, ForcedPrefixSpec(i=10, f=0.8), 100, 1)


def test_default_q_grid():
    grid = default_q_grid(1000)
    assert grid[0] == 0.0 and grid[-1] == 1.0 and len(grid) == 27
    assert all(0.0 <= q <= 1.0 for q in grid)
    assert grid[1] == pytest.approx(1e-3)


def test_sweep_q_anchors():
    n, p = 400, 2 / 3
    rows = sweep_q(n, p, [0.0, 1.0], reps=4000, seed=11)
    empty_row, complete_row = rows
    assert abs(empty_row.estimate.mean / n - (1 - p)) <= 3 * empty_row.estimate.ci95_halfwidth / n + 0.01
    ruin = (1 - p) ** 2 / (p**2 + (1 - p) ** 2)
    assert abs(complete_row.estimate.mean / n - ruin) <= 3 * complete_row.estimate.ci95_halfwidth / n + 0.02


def test_sweep_q_deterministic_and_u_shaped():
    n = 512
    grid = [0.0, 0.02, 0.05, 0.1, 0.3, 1.0]
    rows1 = sweep_q(n, 2 / 3, grid, reps=600, seed=21)
    rows2 = sweep_q(n, 2 / 3, grid, reps=600, seed=21)
    assert [(r.q, r.estimate.mean, r.estimate.ci95_halfwidth) for r in rows1] == [
        (r.q, r.estimate.mean, r.estimate.ci95_halfwidth) for r in rows2
    ]
    means = [r.estimate.mean for r in rows1]
    assert min(means[1:-1]) < means[0] and min(means[1:-1]) < means[-1]


def test_sweep_q_fixed_graph_variant():
    rows = sweep_q(128, 2 / 3, [0.1], reps=400, seed=9, fixed_graph=True)
    rows2 = sweep_q(128, 2 / 3, [0.1], reps=400, seed=9, fixed_graph=True)
    assert rows[0].estimate.mean == rows2[0].estimate.mean
    assert 0 <= rows[0].estimate.mean <= 128


def test_sustainable_correct_fraction():
    for p in (0.6, 2 / 3, 0.9):
        level = sustainable_correct_fraction(p)
        anchor = math.sqrt(p) / (math.sqrt(p) + math.sqrt(1 - p))
        assert anchor < level < p or p < level < anchor
        assert 0.5 < level < 1.0


def test_gnq_annealed_matches_fixed_average():
    """The per-node binomial sweep is a fresh G(n, q) per replicate: its mean
    agrees with averaging trace runs over independently sampled graphs."""
    from cascade_lab import MAJORITY_PROFILE, estimate_expected_wrong
    from cascade_lab.simulate import TopologySource

    from cascade_lab import run_sequence

    n, q, p = 48, 0.15, 2 / 3
    annealed = estimate_expected_wrong(TopologySource.gnq(n, q), MAJORITY_PROFILE, p, 20000, 31)
    rng = np.random.Generator(np.random.Philox(77))
    reps = 1500
    samples = np.empty(reps)
    for r in range(reps):
        topo = sample_gnq(n, q, int(rng.integers(2**31)))
        signals = (rng.random(n) < p).astype(int)
        samples[r] = run_sequence(topo, MAJORITY_PROFILE, signals).wrong_count(1)
    slow_hw = 1.96 * samples.std(ddof=1) / math.sqrt(reps)
    assert abs(annealed.mean - samples.mean()) <= 3 * (annealed.ci95_halfwidth + slow_hw)
