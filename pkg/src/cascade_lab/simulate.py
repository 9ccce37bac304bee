"""Seeded Monte Carlo estimation of the expected wrong count.

Replicate randomness derives from the master seed alone, so a result is a
pure function of (source, profile, p, reps, seed): the numba path re-seeds
per replicate (thread-count independent by construction), the numpy path
draws replicate-vectorized from one Philox stream (single-threaded).
Recognized (source, profile) pairs run on kernels; everything else falls
back to the generic per-trace engine, which is exact but only sensible at
small n.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .backend import use_numba
from .core import (
    AlwaysReveal,
    InputError,
    MajorityRule,
    StrategyProfile,
    Topology,
    run_sequence,
)


@dataclass(frozen=True)
class WrongCountEstimate:
    mean: float
    ci95_halfwidth: float
    reps: int
    master_seed: int


def _estimate_from_samples(samples: np.ndarray, reps: int, seed: int) -> WrongCountEstimate:
    mean = float(samples.mean())
    hw = float(1.96 * samples.std(ddof=1) / math.sqrt(reps)) if reps >= 2 else float("nan")
    return WrongCountEstimate(mean, hw, reps, seed)


@dataclass(frozen=True)
class TopologySource:
    """What to cascade on; `gnq` resamples each replicate, the rest are fixed."""

    kind: str
    n: int
    q: float = 0.0
    topology: Topology | None = None
    sizes: tuple[int, ...] = ()

    @staticmethod
    def empty(n: int) -> "TopologySource":
        return TopologySource("empty", n)

    @staticmethod
    def complete(n: int) -> "TopologySource":
        return TopologySource("complete", n)

    @staticmethod
    def gnq(n: int, q: float) -> "TopologySource":
        if not (0.0 <= q <= 1.0):
            raise InputError(f"need 0 <= q <= 1, got {q}")
        return TopologySource("gnq", n, q=q)

    @staticmethod
    def layers(sizes) -> "TopologySource":
        from .layers import LayerDesign

        design = sizes if isinstance(sizes, LayerDesign) else LayerDesign(tuple(sizes))
        return TopologySource("layers", design.n, sizes=design.sizes)

    @staticmethod
    def fixed(topology: Topology) -> "TopologySource":
        return TopologySource("fixed", topology.n, topology=topology)

    def materialize(self, seed: int) -> Topology:
        from .layers import build_layer_topology
        from .random_graph import sample_gnq

        if self.kind == "empty":
            return Topology.empty(self.n)
        if self.kind == "complete":
            return Topology.complete(self.n)
        if self.kind == "layers":
            return build_layer_topology(self.sizes)
        if self.kind == "fixed":
            return self.topology
        return sample_gnq(self.n, self.q, seed)


def _shared_rule(profile: StrategyProfile):
    return profile.shared


def estimate_expected_wrong(
    source: TopologySource,
    profile: StrategyProfile,
    p: float,
    reps: int,
    master_seed: int,
) -> WrongCountEstimate:
    """Mean and 95% half-width of the wrong count over seeded replicates."""
    from .complete_opt import ThresholdRule

    if reps < 2:
        raise InputError(f"need reps >= 2, got {reps}")
    p = float(p)
    if not (0.5 < p < 1.0):
        raise InputError(f"need 0.5 < p < 1, got {p}")
    n = source.n
    rule = _shared_rule(profile)
    reveal_like = isinstance(rule, AlwaysReveal) or (isinstance(rule, MajorityRule) and source.kind == "empty")

    if reveal_like:
        rng = _kernels.philox(master_seed, 0)
        wrong = _kernels.empty_np(n, p, reps, rng)
    elif isinstance(rule, MajorityRule) and source.kind == "complete":
        if use_numba():
            wrong = _kernels.complete_majority_nb(n, p, _kernels.replicate_seeds(master_seed, 0, reps))
        else:
            wrong = _kernels.complete_majority_np(n, p, reps, _kernels.philox(master_seed, 0))
    elif isinstance(rule, ThresholdRule) and source.kind == "complete":
        if rule.table.n != n:
            raise InputError(f"threshold table covers {rule.table.n} nodes, topology has {n}")
        delta = rule.table.as_array()
        if use_numba():
            wrong = _kernels.complete_threshold_nb(n, p, delta, _kernels.replicate_seeds(master_seed, 0, reps))
        else:
            wrong = _kernels.complete_threshold_np(n, p, delta, reps, _kernels.philox(master_seed, 0))
    elif isinstance(rule, MajorityRule) and source.kind == "layers":
        sizes = np.asarray(source.sizes, dtype=np.int64)
        if use_numba():
            wrong = _kernels.layers_majority_nb(sizes, p, _kernels.replicate_seeds(master_seed, 0, reps))
        else:
            wrong = _kernels.layers_majority_np(sizes, p, reps, _kernels.philox(master_seed, 0))
    elif isinstance(rule, MajorityRule) and source.kind == "gnq":
        # numpy path in both backends: vectorized binomial neighbor counts
        rng = _kernels.philox(master_seed, 0)
        wrong = _kernels.gnq_majority_np(n, source.q, p, reps, rng)
    else:
        wrong = _generic_mc(source, profile, p, reps, master_seed)
    return _estimate_from_samples(np.asarray(wrong, dtype=np.float64), reps, master_seed)


def _generic_mc(source, profile, p, reps, master_seed) -> np.ndarray:
    """Reference path: run the trace engine replicate by replicate."""
    rng = _kernels.philox(master_seed, 0)
    graph_seeds = _kernels.replicate_seeds(master_seed, 1, reps)
    fixed = source.materialize(int(graph_seeds[0])) if source.kind != "gnq" else None
    wrong = np.empty(reps, dtype=np.int64)
    for r in range(reps):
        topo = fixed if fixed is not None else source.materialize(int(graph_seeds[r]))
        signals = (rng.random(source.n) < p).astype(np.int8)  # b = 1: signal 1 is correct
        trace = run_sequence(topo, profile, signals)
        wrong[r] = trace.wrong_count(1)
    return wrong


def compare_topologies(
    n: int,
    p: float,
    reps: int,
    master_seed: int,
    sweep_reps: int | None = None,
    q_grid: list[float] | None = None,
) -> list[tuple[str, str, WrongCountEstimate]]:
    """One estimate per benchmark topology/strategy pair, all seeded from one master.

    Rows: empty and complete under majority, complete under the optimal
    reveal-threshold strategy, G(n, q) at the swept-optimal q, and the
    exact-optimal and asymptotic layer designs under majority.
    """
    from .complete_opt import compute_delta_fast, threshold_strategy
    from .core import MAJORITY_PROFILE
    from .layers import asymptotic_layers, optimal_layers_exact
    from .random_graph import sweep_q

    def sub_seed(tag: int) -> int:
        return int(np.random.SeedSequence(entropy=master_seed, spawn_key=(tag,)).generate_state(1)[0])

    rows: list[tuple[str, str, WrongCountEstimate]] = []
    rows.append(("empty", "maj", estimate_expected_wrong(TopologySource.empty(n), MAJORITY_PROFILE, p, reps, sub_seed(1))))
    rows.append(("complete", "maj", estimate_expected_wrong(TopologySource.complete(n), MAJORITY_PROFILE, p, reps, sub_seed(2))))
    opt_profile = threshold_strategy(compute_delta_fast(n, p))
    rows.append(("complete", "opt", estimate_expected_wrong(TopologySource.complete(n), opt_profile, p, reps, sub_seed(3))))

    sweep = sweep_q(n, p, q_grid, sweep_reps or max(2, reps // 4), sub_seed(4))
    interior = [row for row in sweep if 0.0 < row.q < 1.0] or list(sweep)
    q_hat = min(interior, key=lambda row: row.estimate.mean).q
    rows.append((f"gnq:{q_hat:.6g}", "maj", estimate_expected_wrong(TopologySource.gnq(n, q_hat), MAJORITY_PROFILE, p, reps, sub_seed(5))))

    exact_design, _ = optimal_layers_exact(n, p)
    rows.append(("layers:exact", "maj", estimate_expected_wrong(TopologySource.layers(exact_design), MAJORITY_PROFILE, p, reps, sub_seed(6))))
    asym_design = asymptotic_layers(n, p)
    rows.append(("layers:asym", "maj", estimate_expected_wrong(TopologySource.layers(asym_design), MAJORITY_PROFILE, p, reps, sub_seed(7))))
    return rows
