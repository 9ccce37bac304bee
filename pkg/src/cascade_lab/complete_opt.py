"""Optimal complete-graph strategy via backward induction on (node, |valid diff|).

The optimal rule either reveals the private signal or follows the majority
of all previous outputs, and the reveal region is an interval |diff| <
delta_n(i).  Two solvers produce the threshold table: an O(n^2) sweep over
every reachable state and an O(n log n) banded sweep that only visits
states near the thresholds.  The quadratic solver also returns the loss
table E(i, d) = expected wrong among all n nodes from state (i, d).

Conventions pinned here:
  - a node reveals at state d iff the reveal value undercuts the majority
    value by more than TIE_TOL; exact ties go to majority;
  - delta_n(i) = 1 + the largest reachable d at which node i reveals
    (0 when node i never reveals), so delta_n(n) = n % 2;
  - the majority value counts the already-wrong revealers exactly:
    w(d) * (k-1-d)/2 + (1 - w(d)) * (n - (k-1-d)/2), the accounting that
    agrees with the exhaustive-search oracle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .backend import use_numba
from .core import InputError, Number, Rule, StrategyProfile, majority_decide, signed_diff

TIE_TOL = 1e-9


@dataclass(frozen=True)
class DeltaTable:
    """Reveal thresholds: node i of n follows the majority iff |diff| >= delta[i]."""

    n: int
    p: float
    delta: tuple[int, ...]  # index 0 unused; delta[i] for i in 1..n

    def __post_init__(self):
        if len(self.delta) != self.n + 1:
            raise InputError("delta table must cover nodes 1..n")

    def __getitem__(self, i: int) -> int:
        if not (1 <= i <= self.n):
            raise InputError(f"node index {i} out of range 1..{self.n}")
        return self.delta[i]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.delta, dtype=np.int64)


@dataclass(frozen=True)
class LossTable:
    """E(i, d) values from the quadratic sweep; E(1, 0) is the optimal loss."""

    n: int
    p: float
    optimal_loss: float
    rows: dict[int, np.ndarray] | None = None  # i -> values over d = 0..i-1 (off-parity cells are nan)

    def value(self, i: int, d: int) -> float:
        if self.rows is None:
            raise InputError("loss rows were not retained for this table size")
        return float(self.rows[i][d])


def _w_array(p: float, dmax: int) -> np.ndarray:
    """Posterior that the majority side of a |diff| = d prefix is correct."""
    log_ratio = math.log((1.0 - p) / p)
    return 1.0 / (1.0 + np.exp(np.arange(dmax + 1, dtype=np.float64) * log_ratio))


def reveal_step_value(e_next_up: float, e_next_down: float, p: float, d: int) -> float:
    """Expected loss when the node reveals at |diff| = d.

    From d = 0 any reveal lands at |diff| = 1.  Otherwise the signal joins
    the majority side with probability q1 = w(d) p + (1 - w(d)) (1 - p).
    """
    if d < 0:
        raise InputError(f"need d >= 0, got {d}")
    if d == 0:
        return e_next_up
    w = float(_w_array(p, d)[d])
    q1 = w * p + (1.0 - w) * (1.0 - p)
    return q1 * e_next_up + (1.0 - q1) * e_next_down


def majority_step_value(n: int, k: int, d: int, p: float) -> float:
    """Total expected wrong when node k and all successors follow the majority.

    The k-1 revealed outputs hold (k-1-d)/2 minority votes; those are the
    wrong ones when the majority is correct, else the rest of the run is
    wrong too.
    """
    if k < 2 or not (1 <= d <= k - 1):
        raise InputError(f"majority step needs k >= 2 and 1 <= d <= k-1, got k={k}, d={d}")
    if (d - (k - 1)) % 2 != 0:
        raise InputError(f"parity violation: d={d} unreachable at node k={k}")
    w = float(_w_array(p, d)[d])
    minority = (k - 1 - d) / 2.0
    return w * minority + (1.0 - w) * (n - minority)


def _terminal_row(n: int, w: np.ndarray) -> np.ndarray:
    """E(n+1, d): all n nodes revealed, |diff| = d."""
    d = np.arange(n + 1, dtype=np.float64)
    return w[: n + 1] * (n - d) / 2.0 + (1.0 - w[: n + 1]) * (n + d) / 2.0


def compute_delta_quadratic(n: int, p: float, keep_rows: bool | None = None) -> tuple[DeltaTable, LossTable]:
    """Backward sweep over every reachable (i, d) state; O(n^2) time, O(n) memory."""
    if n < 1:
        raise InputError(f"need n >= 1, got {n}")
    p = float(p)
    if keep_rows is None:
        keep_rows = n <= 2048
    w = _w_array(p, n + 1)
    q1 = w * p + (1.0 - w) * (1.0 - p)
    e_next = np.empty(n + 2)
    e_next[: n + 1] = _terminal_row(n, w)
    e_next[n + 1] = 0.0  # never read
    delta = [0] * (n + 1)
    rows: dict[int, np.ndarray] | None = {} if keep_rows else None
    for i in range(n, 0, -1):
        par = (i - 1) % 2
        ds = np.arange(par, i, 2)
        e_cur = np.full(n + 2, np.nan)
        if ds.size:
            up = e_next[ds + 1]
            down = e_next[np.maximum(ds - 1, 0)]
            reveal_vals = q1[ds] * up + (1.0 - q1[ds]) * down
            if par == 0:
                reveal_vals[0] = e_next[1]
            minority = (i - 1 - ds) / 2.0
            maj_vals = w[ds] * minority + (1.0 - w[ds]) * (n - minority)
            reveal = (maj_vals - reveal_vals) > TIE_TOL
            if par == 0:
                reveal[0] = True  # no majority action exists at d = 0
            e_cur[ds] = np.where(reveal, reveal_vals, maj_vals)
            hits = ds[reveal]
            delta[i] = int(hits[-1]) + 1 if hits.size else 0
        if rows is not None:
            rows[i] = e_cur[:i].copy() if i > 1 else e_cur[:1].copy()
        e_next = e_cur
    optimal = float(e_next[0])
    table = DeltaTable(n, p, tuple(delta))
    return table, LossTable(n, p, optimal, rows)


def _band_width(n: int, p: float) -> int:
    spread = abs(math.log((1.0 - p) / p))
    return max(48, int(4.0 * math.log(n + 2) / spread) + 16)


def _run_band(n: int, p: float):
    band = _band_width(n, p)
    while True:
        w = _w_array(p, band)
        q1 = w * p + (1.0 - w) * (1.0 - p)
        fn = _kernels.delta_band_nb if use_numba() else _kernels.delta_band_np
        delta, loss, edge_hit = fn(n, p, w, q1, TIE_TOL)
        if not edge_hit and int(delta.max()) + 4 <= band:
            return delta, float(loss)
        band *= 2  # thresholds approached the band edge; redo wider


def compute_delta_fast(n: int, p: float) -> DeltaTable:
    """Banded sweep visiting only states with d near the thresholds; O(n log n)."""
    if n < 1:
        raise InputError(f"need n >= 1, got {n}")
    p = float(p)
    delta, _ = _run_band(n, p)
    return DeltaTable(n, p, tuple(int(x) for x in delta))


def optimal_expected_wrong(n: int, p: float) -> float:
    """E(1, 0): expected wrong count of the optimal complete-graph strategy."""
    if n < 1:
        raise InputError(f"need n >= 1, got {n}")
    _, loss = _run_band(n, float(p))
    return loss


_UNIVERSAL_CACHE: dict[float, DeltaTable] = {}


def universal_delta(remaining: int, p: float) -> int:
    """delta as a function of the number of nodes left: delta_n(i) = delta(n - i).

    The table is computed once for an even capacity and indexed by n - i;
    thresholds for equal-parity positions coincide across n (the threshold
    integer itself carries the parity of n - remaining).
    """
    if remaining < 0:
        raise InputError(f"need remaining >= 0, got {remaining}")
    p = float(p)
    cached = _UNIVERSAL_CACHE.get(p)
    if cached is None or cached.n < remaining + 2:
        size = max(64, 2 * (remaining + 2))
        cached = compute_delta_fast(size, p)
        _UNIVERSAL_CACHE[p] = cached
    return cached[cached.n - remaining]


class ThresholdRule(Rule):
    """Reveal while |diff of valid observations| < delta[i], else copy the majority.

    Validity of observed decisions is reconstructed by replaying the
    threshold recursion over the observed sequence, which is exact when the
    observed sequence is the full prefix (complete graphs, the setting the
    table is optimal for).
    """

    def __init__(self, table: DeltaTable):
        self.table = table

    def _valid_diff(self, observed: tuple[int, ...]) -> int:
        vdiff = 0
        for pos, c in enumerate(observed, start=1):
            if abs(vdiff) < self.table[min(pos, self.table.n)]:
                vdiff += 1 if c == 1 else -1
        return vdiff

    def decide(self, observed, signal, node):
        vdiff = self._valid_diff(observed)
        if abs(vdiff) < self.table[node]:
            return signal
        maj = signed_diff(observed)
        if maj == 0:  # unreachable on complete graphs once |vdiff| >= delta >= 1
            return majority_decide(observed, signal)
        return 1 if maj > 0 else 0

    def __repr__(self):
        return f"ThresholdRule(n={self.table.n}, p={self.table.p})"


def threshold_strategy(table: DeltaTable) -> StrategyProfile:
    """Strategy profile implementing the optimal reveal-threshold rule."""
    return StrategyProfile.uniform(ThresholdRule(table))


def lower_bound_curve(n: int, p: Number) -> float:
    """min((1-p) log_{p/(1-p)} n / 2, sqrt(n)/2): floor under every topology/strategy."""
    if n < 2:
        raise InputError(f"need n >= 2, got {n}")
    p = float(p)
    log_term = (1.0 - p) * (math.log(n) / math.log(p / (1.0 - p))) / 2.0
    return min(log_term, math.sqrt(n) / 2.0)
