"""Monte Carlo estimator: determinism, CI behavior, oracle agreement."""
import math
from fractions import Fraction

import pytest

from cascade_lab import (
    InputError,
    MAJORITY_PROFILE,
    REVEAL_PROFILE,
    Topology,
    backend,
    compare_topologies,
    compute_delta_fast,
    estimate_expected_wrong,
    exact_expected_wrong,
    threshold_strategy,
)
from cascade_lab.simulate import TopologySource

F = Fraction


def test_reps_floor():
    with pytest.raises(InputError):
        estimate_expected_wrong(TopologySource.empty(5), MAJORITY_PROFILE, 2 / 3, 1, 1)


def test_empty_anchor():
    est = estimate_expected_wrong(TopologySource.empty(200), MAJORITY_PROFILE, 0.7, 20000, 8)
    assert abs(est.mean / 200 - 0.3) <= 3 * est.ci95_halfwidth / 200 + 1e-9
    assert est.reps == 20000 and est.master_seed == 8


def test_deterministic_across_worker_caps():
    results = []
    for workers in (1, 4, 16):
        backend.set_workers(workers)
        est = estimate_expected_wrong(TopologySource.complete(300), MAJORITY_PROFILE, 2 / 3, 5000, 77)
        again = estimate_expected_wrong(TopologySource.complete(300), MAJORITY_PROFILE, 2 / 3, 5000, 77)
        assert (est.mean, est.ci95_halfwidth) == (again.mean, again.ci95_halfwidth)
        results.append((est.mean, est.ci95_halfwidth))
    assert len(set(results)) == 1


def test_halfwidth_scales_with_reps():
    est1 = estimate_expected_wrong(TopologySource.complete(64), MAJORITY_PROFILE, 2 / 3, 20000, 5)
    est2 = estimate_expected_wrong(TopologySource.complete(64), MAJORITY_PROFILE, 2 / 3, 40000, 5)
    shrink = est1.ci95_halfwidth / est2.ci95_halfwidth
    assert abs(shrink - math.sqrt(2)) < 0.2 * math.sqrt(2)


FIXTURES = [
    (TopologySource.empty(7), MAJORITY_PROFILE),
    (TopologySource.complete(10), MAJORITY_PROFILE),
    (TopologySource.complete(12), REVEAL_PROFILE),
    (TopologySource.layers((3, 2, 4)), MAJORITY_PROFILE),
    (TopologySource.fixed(Topology.from_edges(8, [(1, 2), (2, 3), (1, 4), (3, 5), (4, 6), (5, 7), (2, 8)])), MAJORITY_PROFILE),
]


@pytest.mark.parametrize("source,profile", FIXTURES)
def test_oracle_agreement(source, profile):
    exact = float(exact_expected_wrong(source.materialize(0), profile, F(2, 3)).expected_wrong)
    est = estimate_expected_wrong(source, profile, 2 / 3, 40000, 13)
    assert abs(est.mean - exact) <= 3 * est.ci95_halfwidth + 1e-9


def test_threshold_oracle_agreement():
    n = 12
    profile = threshold_strategy(compute_delta_fast(n, 2 / 3))
    exact = float(exact_expected_wrong(Topology.complete(n), profile, F(2, 3)).expected_wrong)
    for use_numpy in (False, True):
        prev = backend.set_backend("numpy") if use_numpy else None
        try:
            est = estimate_expected_wrong(TopologySource.complete(n), profile, 2 / 3, 60000, 23)
            assert abs(est.mean - exact) <= 3 * est.ci95_halfwidth
        finally:
            if prev is not None:
                backend.set_backend(prev)


def test_numpy_backend_matches_exact(numpy_backend):
    est = estimate_expected_wrong(TopologySource.complete(10), MAJORITY_PROFILE, 2 / 3, 40000, 3)
    exact = float(exact_expected_wrong(Topology.complete(10), MAJORITY_PROFILE, F(2, 3)).expected_wrong)
    assert abs(est.mean - exact) <= 3 * est.ci95_halfwidth


def test_gnq_source_resamples_but_is_seeded():
    src = TopologySource.gnq(64, 0.1)
    a = estimate_expected_wrong(src, MAJORITY_PROFILE, 2 / 3, 2000, 5)
    b = estimate_expected_wrong(src, MAJORITY_PROFILE, 2 / 3, 2000, 5)
    c = estimate_expected_wrong(src, MAJORITY_PROFILE, 2 / 3, 2000, 6)
    assert a == b and a.mean != c.mean


def test_compare_topologies_structure():
    rows = compare_topologies(32, 2 / 3, reps=300, master_seed=42, sweep_reps=60)
    labels = [(t, s) for t, s, _ in rows]
    assert labels[0] == ("empty", "maj")
    assert labels[1] == ("complete", "maj")
    assert labels[2] == ("complete", "opt")
    assert labels[3][0].startswith("gnq:") and labels[3][1] == "maj"
    assert labels[4] == ("layers:exact", "maj")
    assert labels[5] == ("layers:asym", "maj")
    again = compare_topologies(32, 2 / 3, reps=300, master_seed=42, sweep_reps=60)
    assert [(t, s, e.mean) for t, s, e in rows] == [(t, s, e.mean) for t, s, e in again]
    empty_mean = rows[0][2].mean
    assert abs(empty_mean / 32 - 1 / 3) < 0.1


def test_compare_orderings_at_scale():
    """The threshold-optimal row floors the table; good layers beat the corners."""
    n = 4096
    rows = compare_topologies(n, 2 / 3, reps=400, master_seed=9, sweep_reps=120)
    by = {(t, s): e for t, s, e in rows}
    opt = by[("complete", "opt")]
    for key, est in by.items():
        if key == ("complete", "opt"):
            continue
        joint = 3 * (opt.ci95_halfwidth + est.ci95_halfwidth)
        assert opt.mean <= est.mean + joint, f"optimal row above {key}"
    layers = by[("layers:exact", "maj")]
    complete = by[("complete", "maj")]
    empty = by[("empty", "maj")]
    assert layers.mean < complete.mean and layers.mean < empty.mean
