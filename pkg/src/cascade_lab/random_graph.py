"""G(n, q) generation, the q-sweep, and forced-prefix bound harnesses.

The sweep resamples the graph every replicate (the expectation of interest
averages over the graph distribution); `fixed_graph=True` freezes one draw
per q for quenched exploration.  Forced-prefix runs pin the first i
*outputs* (not signals) to a chosen correct fraction and measure the next
node's failure probability, which checks the tail bounds on conditional
failure empirically; an exact convolution twin backs the Monte Carlo.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import binom

from . import _kernels
from .core import InputError, Topology, MAJORITY_PROFILE
from .simulate import WrongCountEstimate, _estimate_from_samples


@dataclass(frozen=True)
class SweepRow:
    n: int
    q: float
    estimate: WrongCountEstimate


@dataclass(frozen=True)
class ForcedPrefixSpec:
    """Force floor(f * i) of the first i outputs correct, the rest wrong."""

    i: int
    f: float

    def __post_init__(self):
        if not (0.5 < self.f <= 1.0):
            raise InputError(f"need 0.5 < f <= 1, got {self.f}")
        if self.i < 1:
            raise InputError(f"need prefix length >= 1, got {self.i}")

    @property
    def n_correct(self) -> int:
        return int(self.f * self.i)

    @property
    def n_wrong(self) -> int:
        return self.i - self.n_correct


def sample_gnq(n: int, q: float, seed: int) -> Topology:
    """One draw of G(n, q) as earlier-neighbor lists; deterministic in seed."""
    if not (0.0 <= q <= 1.0):
        raise InputError(f"need 0 <= q <= 1, got {q}")
    if q == 0.0:
        return Topology.empty(n)
    if q == 1.0:
        return Topology.complete(n)
    rng = _kernels.philox(seed, 0)
    lists: list[tuple[int, ...]] = [()]
    for i in range(2, n + 1):
        k = int(rng.binomial(i - 1, q))
        if k == 0:
            lists.append(())
        else:
            chosen = rng.choice(i - 1, size=k, replace=False)
            lists.append(tuple(sorted(int(j) + 1 for j in chosen)))
    return Topology(n, tuple(lists))


def default_q_grid(n: int, points: int = 25) -> list[float]:
    """Geometric grid over [1/n, 1] plus the exact endpoints 0 and 1."""
    grid = np.geomspace(1.0 / n, 1.0, points)
    return [0.0] + [float(q) for q in grid] + [1.0]


def sweep_q(
    n: int,
    p: float,
    q_grid: list[float] | None,
    reps: int,
    seed: int,
    fixed_graph: bool = False,
) -> list[SweepRow]:
    """Estimate E under the majority rule for each q, graphs fresh per replicate."""
    from .simulate import estimate_expected_wrong, TopologySource

    if q_grid is None:
        q_grid = default_q_grid(n)
    if any(not (0.0 <= q <= 1.0) for q in q_grid):
        raise InputError("q grid values must lie in [0, 1]")
    if reps < 1:
        raise InputError(f"need reps >= 1, got {reps}")
    rows = []
    for idx, q in enumerate(q_grid):
        row_seed = int(np.random.SeedSequence(entropy=seed, spawn_key=(idx,)).generate_state(1)[0])
        if fixed_graph and 0.0 < q < 1.0:
            source = TopologySource.fixed(sample_gnq(n, q, row_seed))
        else:
            source = TopologySource.gnq(n, q)
        est = estimate_expected_wrong(source, MAJORITY_PROFILE, p, reps, row_seed)
        rows.append(SweepRow(n, float(q), est))
    return rows


def exponential_bound(i: int, q: float, f: float) -> float:
    """exp(-q i (sqrt(f) - sqrt(1-f))^2): tail bound on conditional failure."""
    if not (0.0 <= f <= 1.0):
        raise InputError(f"need 0 <= f <= 1, got {f}")
    return math.exp(-q * i * (math.sqrt(f) - math.sqrt(1.0 - f)) ** 2)


def forced_prefix_failure(
    n: int,
    q: float,
    p: float,
    spec: ForcedPrefixSpec,
    reps: int,
    seed: int,
) -> WrongCountEstimate:
    """Monte Carlo failure probability of node i+1 after a forced prefix."""
    if spec.i >= n:
        raise InputError(f"prefix length {spec.i} must be < n = {n}")
    rng = _kernels.philox(seed, 0)
    fails = _kernels.forced_prefix_np(spec.n_correct, spec.n_wrong, q, p, reps, rng)
    return _estimate_from_samples(fails, reps, seed)


def forced_prefix_failure_exact(q: float, p: float, spec: ForcedPrefixSpec) -> float:
    """Exact failure probability of the node after the forced prefix.

    Failure = p Pr[C - W <= -2] + (1-p) Pr[C - W <= 1] with C ~ Bin(fi, q),
    W ~ Bin((1-f)i, q): the node fails when its neighborhood majority is
    wrong outright, or is near-tied and the private signal is wrong.
    """
    nc, nw = spec.n_correct, spec.n_wrong
    c = np.arange(nc + 1)
    pmf_c = binom.pmf(c, nc, q)
    cdf_w = lambda t: binom.sf(t - 1, nw, q) if nw > 0 else (np.asarray(t) <= 0).astype(float)
    # Pr[C - W <= t] = sum_c pmf_c(c) Pr[W >= c - t]
    def p_le(t: int) -> float:
        return float(np.sum(pmf_c * np.asarray([cdf_w(cc - t) for cc in c])))

    return p * p_le(-2) + (1.0 - p) * p_le(1)


def sustainable_correct_fraction(p: float) -> float:
    """(p + sqrt(p)/(sqrt(p)+sqrt(1-p))) / 2: correct-output share that keeps
    renewing itself through the early segments of a well-tuned random graph."""
    sp, sq = math.sqrt(p), math.sqrt(1.0 - p)
    return 0.5 * (p + sp / (sp + sq))
