"""Brute-force exact computations on small instances.

Two independent routes live here: exact expectation of wrong decisions by
full signal enumeration (any topology, any profile, n <= 24), and the exact
optimum over all deterministic strategy profiles on the complete graph via
backward induction on the posterior state.  Both carry exact rationals when
p is a Fraction, so equalities like 25/27 are checked exactly.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .core import CapacityError, InputError, Number, StrategyProfile, Topology, run_sequence

ENUM_MAX_N = 24
OPT_MAX_N = 10


@dataclass(frozen=True)
class ExactLoss:
    expected_wrong: Number
    n: int


def _signal_weight(signals, p: Number, ground_truth: int):
    match = sum(1 for s in signals if s == ground_truth)
    return p ** match * (1 - p) ** (len(signals) - match)


def exact_expected_wrong(
    topology: Topology,
    profile: StrategyProfile,
    p: Number,
    ground_truth: int = 1,
) -> ExactLoss:
    """Exact E over all 2^n signal vectors; exact rational when p is a Fraction."""
    n = topology.n
    if n > ENUM_MAX_N:
        raise CapacityError(f"signal enumeration is capped at n = {ENUM_MAX_N}, got {n}")
    total = Fraction(0) if isinstance(p, Fraction) else 0.0
    for signals in itertools.product((0, 1), repeat=n):
        w = _signal_weight(signals, p, ground_truth)
        trace = run_sequence(topology, profile, signals)
        total += w * trace.wrong_count(ground_truth)
    return ExactLoss(total, n)


def failure_prob_node(
    topology: Topology,
    profile: StrategyProfile,
    p: Number,
    i: int,
    ground_truth: int = 1,
) -> Number:
    """Marginal probability that node i decides against the ground truth."""
    n = topology.n
    if n > ENUM_MAX_N:
        raise CapacityError(f"signal enumeration is capped at n = {ENUM_MAX_N}, got {n}")
    if not (1 <= i <= n):
        raise InputError(f"node index {i} out of range 1..{n}")
    total = Fraction(0) if isinstance(p, Fraction) else 0.0
    for signals in itertools.product((0, 1), repeat=n):
        w = _signal_weight(signals, p, ground_truth)
        trace = run_sequence(topology, profile, signals)
        if trace.decisions[i - 1] != ground_truth:
            total += w
    return total


# --------------------------------------------------------------------------
# exact optimum over all deterministic profiles, complete graph
# --------------------------------------------------------------------------

REVEAL, CONST0, CONST1 = "reveal", "const0", "const1"


def exhaustive_optimal_complete(n: int, p: Number) -> tuple[ExactLoss, dict[tuple[int, int], str]]:
    """Minimum E over all deterministic strategy profiles on the complete graph.

    Backward induction over (node index, signed diff of revealed signals),
    which indexes the observer posterior on b; ground truth has a uniform
    prior.  Per prefix a deterministic rule is one of four maps of the
    signal; anti-reveal (output 1 - s) yields the same posterior path as
    reveal at strictly higher immediate cost, so three actions remain:
    output 0, output 1, or output the signal.  Ties break toward reveal.

    Returns the optimum and the action table keyed by (i, signed_diff);
    every history maps to its state through the diff of its valid entries.
    """
    if n > OPT_MAX_N:
        raise CapacityError(f"optimal-strategy search is capped at n = {OPT_MAX_N}, got {n}")
    if n < 1:
        raise InputError(f"need n >= 1, got {n}")
    exact = isinstance(p, Fraction)
    one = Fraction(1) if exact else 1.0

    @lru_cache(maxsize=None)
    def posterior(d: int):
        return one / (1 + ((1 - p) / p) ** d)

    @lru_cache(maxsize=None)
    def best(i: int, d: int):
        if i > n:
            return one - one, None
        pi = posterior(d)
        p_one = pi * p + (1 - pi) * (1 - p)  # Pr[revealed decision is 1]
        v_reveal = (1 - p) + p_one * best(i + 1, d + 1)[0] + (1 - p_one) * best(i + 1, d - 1)[0]
        v_const0 = pi + best(i + 1, d)[0]
        v_const1 = (1 - pi) + best(i + 1, d)[0]
        value = min(v_reveal, v_const0, v_const1)
        if v_reveal == value:
            action = REVEAL
        elif d >= 0:  # prefer copying the majority side between equal consts
            action = CONST1 if v_const1 <= v_const0 else CONST0
        else:
            action = CONST0 if v_const0 <= v_const1 else CONST1
        return value, action

    table = {}
    for i in range(1, n + 1):
        for d in range(-(i - 1), i):
            if (d - (i - 1)) % 2 == 0:
                table[(i, d)] = best(i, d)[1]
    return ExactLoss(best(1, 0)[0], n), table


def search_all_profiles(n: int, p: Number) -> Number:
    """Literal minimum over every deterministic profile (4 signal maps per history).

    Exponential in 2^n; only sensible for n <= 3.  Used to validate
    exhaustive_optimal_complete from a route with no shared structure.
    """
    if n > 3:
        raise CapacityError("profile-tree enumeration is only run for n <= 3")
    histories = [list(itertools.product((0, 1), repeat=i)) for i in range(n)]

    def apply(m, s):
        if m == 0:
            return 0
        if m == 1:
            return 1
        if m == 2:
            return s
        return 1 - s

    best = None
    for assign in itertools.product(
        *[itertools.product(range(4), repeat=len(histories[i])) for i in range(n)]
    ):
        e = Fraction(0) if isinstance(p, Fraction) else 0.0
        for b in (0, 1):
            for signals in itertools.product((0, 1), repeat=n):
                w = _signal_weight(signals, p, b) / 2
                decisions: list[int] = []
                for i in range(n):
                    idx = histories[i].index(tuple(decisions))
                    decisions.append(apply(assign[i][idx], signals[i]))
                e += w * sum(1 for c in decisions if c != b)
        if best is None or e < best:
            best = e
    return best
