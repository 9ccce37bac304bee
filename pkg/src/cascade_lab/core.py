"""Domain types and the deterministic single-trace cascade engine.

Nodes are numbered 1..n and decide in that order.  Node i sees the
decisions of its earlier neighbors (j < i with an edge) plus its own
private signal, which equals the ground truth with probability p.
Ties in the majority rule resolve to the node's own signal; a node's
output is *valid* when it equals the signal as a function of the signal
(i.e. the rule passes the signal through for this prefix).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np


class InputError(ValueError):
    """Malformed user input (files, parameters)."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class CapacityError(ValueError):
    """Instance exceeds an enumeration capacity bound."""


Number = float | Fraction


@dataclass(frozen=True)
class SignalModel:
    """Private-signal distribution: correct with probability p against ground_truth."""

    p: Number
    ground_truth: int = 1

    def __post_init__(self):
        if self.ground_truth not in (0, 1):
            raise InputError(f"ground_truth must be 0 or 1, got {self.ground_truth}")
        if not (Fraction(1, 2) < Fraction(self.p) < 1):
            raise InputError(f"signal accuracy must satisfy 0.5 < p < 1, got {self.p}")

    def draw_signals(self, rng: np.random.Generator, n: int) -> np.ndarray:
        correct = rng.random(n) < float(self.p)
        return np.where(correct, self.ground_truth, 1 - self.ground_truth).astype(np.int8)


@dataclass(frozen=True)
class Topology:
    """Observation graph over ordered nodes: node i sees decisions of earlier neighbors.

    `neighbors` holds, for each node i (1-based slot i-1), a sorted tuple of
    the earlier nodes j < i it observes.
    """

    n: int
    neighbors: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.n < 1:
            raise InputError(f"need n >= 1, got {self.n}")
        if len(self.neighbors) != self.n:
            raise InputError(f"expected {self.n} neighbor lists, got {len(self.neighbors)}")
        for i, nbrs in enumerate(self.neighbors, start=1):
            prev = 0
            for j in nbrs:
                if not (1 <= j < i):
                    raise InputError(f"node {i} lists neighbor {j}, need 1 <= j < {i}")
                if j <= prev:
                    raise InputError(f"node {i} has duplicate/unsorted neighbor {j}")
                prev = j

    @staticmethod
    def empty(n: int) -> "Topology":
        return Topology(n, tuple(() for _ in range(n)))

    @staticmethod
    def complete(n: int) -> "Topology":
        return Topology(n, tuple(tuple(range(1, i)) for i in range(1, n + 1)))

    @staticmethod
    def from_edges(n: int, edges: Sequence[tuple[int, int]]) -> "Topology":
        seen = set()
        lists: list[list[int]] = [[] for _ in range(n)]
        for j, i in edges:
            if not (1 <= j < i <= n):
                raise InputError(f"edge ({j}, {i}) violates 1 <= j < i <= {n}")
            if (j, i) in seen:
                raise InputError(f"duplicate edge ({j}, {i})")
            seen.add((j, i))
            lists[i - 1].append(j)
        return Topology(n, tuple(tuple(sorted(l)) for l in lists))

    def earlier_neighbors(self, i: int) -> tuple[int, ...]:
        return self.neighbors[i - 1]

    def edge_count(self) -> int:
        return sum(len(nbrs) for nbrs in self.neighbors)


def read_edge_list(path: str) -> Topology:
    """Parse the edge-list file format: line 1 holds n, then `j i` per edge."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or not lines[0].strip():
        raise InputError("missing node count", line=1)
    try:
        n = int(lines[0].strip())
    except ValueError:
        raise InputError(f"unparsable node count {lines[0]!r}", line=1) from None
    if n < 1:
        raise InputError(f"need n >= 1, got {n}", line=1)
    edges = []
    seen = set()
    for lineno, raw in enumerate(lines[1:], start=2):
        if not raw.strip():
            continue
        parts = raw.split()
        if len(parts) != 2:
            raise InputError(f"expected `j i`, got {raw!r}", line=lineno)
        try:
            j, i = int(parts[0]), int(parts[1])
        except ValueError:
            raise InputError(f"unparsable edge {raw!r}", line=lineno) from None
        if not (1 <= j < i <= n):
            raise InputError(f"edge ({j}, {i}) violates 1 <= j < i <= {n}", line=lineno)
        if (j, i) in seen:
            raise InputError(f"duplicate edge ({j}, {i})", line=lineno)
        seen.add((j, i))
        edges.append((j, i))
    return Topology.from_edges(n, edges)


# --------------------------------------------------------------------------
# primitive operations
# --------------------------------------------------------------------------

def majority_decide(neighbor_votes: Sequence[int], own_signal: int) -> int:
    """Strict majority of votes plus the node's own signal; ties return the signal."""
    diff = signed_diff(neighbor_votes) + (1 if own_signal == 1 else -1)
    if diff > 0:
        return 1
    if diff < 0:
        return 0
    return own_signal


def signed_diff(bits: Sequence[int]) -> int:
    """Count of ones minus count of zeros."""
    ones = sum(1 for b in bits if b == 1)
    return 2 * ones - len(bits)


def posterior_truth_given_diff(p: Number, d: int) -> Number:
    """Pr[b = 1 | signed diff of valid signals = d] = 1 / (1 + ((1-p)/p)**d)."""
    if isinstance(p, Fraction):
        return 1 / (1 + ((1 - p) / p) ** d)
    if not (0.5 < p < 1):
        raise InputError(f"need 0.5 < p < 1, got {p}")
    # exp-form is stable for large |d|
    import math

    return 1.0 / (1.0 + math.exp(d * math.log((1.0 - p) / p)))


# --------------------------------------------------------------------------
# decision rules
# --------------------------------------------------------------------------

class Rule:
    """Deterministic total map (observed earlier decisions, own signal, node) -> bit."""

    def decide(self, observed: tuple[int, ...], signal: int, node: int) -> int:
        raise NotImplementedError


class MajorityRule(Rule):
    def decide(self, observed, signal, node):
        return majority_decide(observed, signal)

    def __repr__(self):
        return "MajorityRule()"


class AlwaysReveal(Rule):
    def decide(self, observed, signal, node):
        return signal

    def __repr__(self):
        return "AlwaysReveal()"


class CustomRule(Rule):
    def __init__(self, fn: Callable[[tuple[int, ...], int, int], int]):
        self.fn = fn

    def decide(self, observed, signal, node):
        return self.fn(observed, signal, node)


MAJORITY = MajorityRule()
ALWAYS_REVEAL = AlwaysReveal()


@dataclass(frozen=True)
class StrategyProfile:
    """Per-node decision rules; `uniform` gives every node the same rule."""

    rules: tuple[Rule, ...] | None = None
    shared: Rule | None = None

    @staticmethod
    def uniform(rule: Rule) -> "StrategyProfile":
        return StrategyProfile(shared=rule)

    @staticmethod
    def per_node(rules: Sequence[Rule]) -> "StrategyProfile":
        return StrategyProfile(rules=tuple(rules))

    def rule_for(self, i: int) -> Rule:
        if self.shared is not None:
            return self.shared
        if self.rules is None or not (1 <= i <= len(self.rules)):
            raise InputError(f"profile has no rule for node {i}")
        return self.rules[i - 1]


MAJORITY_PROFILE = StrategyProfile.uniform(MAJORITY)
REVEAL_PROFILE = StrategyProfile.uniform(ALWAYS_REVEAL)


def is_revealing(rule: Rule, i: int, observed_prefix: tuple[int, ...]) -> bool:
    """True iff the rule passes the signal through for this prefix (both signal values)."""
    return rule.decide(observed_prefix, 0, i) == 0 and rule.decide(observed_prefix, 1, i) == 1


@dataclass(frozen=True)
class DecisionTrace:
    signals: tuple[int, ...]
    decisions: tuple[int, ...]
    valid_mask: tuple[bool, ...]

    def __post_init__(self):
        if not (len(self.signals) == len(self.decisions) == len(self.valid_mask)):
            raise InputError("trace field lengths differ")
        for s, c, v in zip(self.signals, self.decisions, self.valid_mask):
            if v and s != c:
                raise InputError("valid_mask set where decision != signal")

    def wrong_count(self, ground_truth: int = 1) -> int:
        return sum(1 for c in self.decisions if c != ground_truth)


def run_sequence(topology: Topology, profile: StrategyProfile, signals: Sequence[int]) -> DecisionTrace:
    """Run one cascade: nodes decide in order, each seeing earlier-neighbor decisions."""
    n = topology.n
    if len(signals) != n:
        raise InputError(f"expected {n} signals, got {len(signals)}")
    decisions: list[int] = []
    mask: list[bool] = []
    for i in range(1, n + 1):
        rule = profile.rule_for(i)
        observed = tuple(decisions[j - 1] for j in topology.earlier_neighbors(i))
        s = int(signals[i - 1])
        if s not in (0, 1):
            raise InputError(f"signal {s} at node {i} is not a bit")
        c = rule.decide(observed, s, i)
        revealing = is_revealing(rule, i, observed)
        decisions.append(int(c))
        mask.append(bool(revealing))
    return DecisionTrace(tuple(int(s) for s in signals), tuple(decisions), tuple(mask))


def valid_subsequence(trace: DecisionTrace) -> tuple[int, ...]:
    """Decisions at positions flagged valid, order preserved."""
    return tuple(c for c, v in zip(trace.decisions, trace.valid_mask) if v)
