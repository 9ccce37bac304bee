"""Layer-graph analytics and optimization.

A layer design splits the n nodes into ordered layers; every node observes
exactly the full previous layer.  A layer of independent signals either
locks in a cascade (one side ahead by >= 2) or passes the baton.  Two loss
semantics ship:

  pooled-carry  an odd non-cascading layer leaves a one-vote surplus
               that joins the next layer's pool as one extra p-accurate
               signal, and a cascade absorbs every node behind it;
  strict       each layer sees only the previous layer's outputs, so the
               surplus vote dies at the boundary and a cascade dies when
               it crosses a size-1 layer (this is what the simulator on
               the actual topology does).

Both are exact; cascade tail probabilities are complementary binomial sums
(rationals when p is a Fraction).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from scipy.stats import binom

from .core import InputError, Number, Topology

POOLED_CARRY = "pooled-carry"
STRICT = "strict"


@dataclass(frozen=True)
class LayerDesign:
    sizes: tuple[int, ...]

    def __post_init__(self):
        if not self.sizes:
            raise InputError("a layer design needs at least one layer")
        if any(a < 1 for a in self.sizes):
            raise InputError(f"layer sizes must be >= 1, got {self.sizes}")

    @property
    def n(self) -> int:
        return sum(self.sizes)

    @property
    def k(self) -> int:
        return len(self.sizes)


@dataclass(frozen=True)
class CascadeProbs:
    """Outcome split of one layer of independent signals."""

    p_wrong: Number
    p_none: Number
    p_correct: Number


def signal_ratio_base(p: Number) -> Number:
    """s = 1 / (4 p (1-p)): the base governing optimal layer sizes."""
    return 1 / (4 * p * (1 - p)) if isinstance(p, Fraction) else 1.0 / (4.0 * p * (1.0 - p))


def cascade_probs(a: int, p: Number) -> CascadeProbs:
    """Exact cascade split for a fresh signals: wrong iff behind by >= 2, none iff |diff| <= 1."""
    if a < 1:
        raise InputError(f"need a >= 1, got {a}")
    k_wrong = (a - 2) // 2  # correct-count c <= k_wrong  <=>  wrong - correct >= 2
    k_corr = (a + 2 + 1) // 2  # correct-count c >= k_corr  <=>  correct - wrong >= 2
    if isinstance(p, Fraction):
        pmf = [Fraction(math.comb(a, c)) * p**c * (1 - p) ** (a - c) for c in range(a + 1)]
        p_w = sum(pmf[: k_wrong + 1], Fraction(0))
        p_c = sum(pmf[k_corr:], Fraction(0)) if k_corr <= a else Fraction(0)
        return CascadeProbs(p_w, 1 - p_w - p_c, p_c)
    p_w = float(binom.cdf(k_wrong, a, p)) if k_wrong >= 0 else 0.0
    p_c = float(binom.sf(k_corr - 1, a, p)) if k_corr <= a else 0.0
    return CascadeProbs(p_w, 1.0 - p_w - p_c, p_c)


def _probs_cache(p: Number):
    @lru_cache(maxsize=None)
    def get(a: int) -> CascadeProbs:
        return cascade_probs(a, p)

    return get


def layer_expected_wrong(design: LayerDesign | Sequence[int], p: Number, semantics: str = POOLED_CARRY) -> Number:
    """Exact expected wrong count of a layer design under the chosen semantics."""
    sizes = design.sizes if isinstance(design, LayerDesign) else tuple(design)
    if not sizes:
        raise InputError("empty layer design")
    LayerDesign(sizes)  # validate
    if semantics not in (POOLED_CARRY, STRICT):
        raise InputError(f"unknown semantics {semantics!r}")
    probs = _probs_cache(p)
    zero = Fraction(0) if isinstance(p, Fraction) else 0.0
    one = Fraction(1) if isinstance(p, Fraction) else 1.0
    wrong = zero
    if semantics == POOLED_CARRY:
        remaining = sum(sizes)
        alive = {0: one, 1: zero}  # carry in {0, 1} extra pooled votes
        for a in sizes:
            remaining -= a
            live = alive[0] + alive[1]
            wrong += live * a * (1 - p)
            nxt = {0: zero, 1: zero}
            for c in (0, 1):
                if alive[c] == 0:
                    continue
                pool = probs(a + c)
                wrong += alive[c] * pool.p_wrong * remaining
                nxt[(a + c) % 2] += alive[c] * pool.p_none
            alive = nxt
        return wrong
    # strict: states are reveal / cascade-correct / cascade-wrong
    reveal, casc_wrong = one, zero
    for a in sizes:
        casc_corr = one - reveal - casc_wrong
        wrong += reveal * a * (1 - p) + casc_wrong * a
        pool = probs(a)
        if a >= 2:
            reveal, casc_wrong = reveal * pool.p_none, reveal * pool.p_wrong + casc_wrong
        else:
            # a size-1 layer emits |diff| = 1, so the next layer reveals
            reveal, casc_wrong = reveal * pool.p_none + casc_wrong + casc_corr, zero
    return wrong


def optimal_two_layer(n: int, p: Number) -> tuple[int, Number, float]:
    """Exact argmin of the two-layer loss over the first-layer size.

    Returns (a1*, loss, closed_form_estimate) where the estimate is
    log_s n - log_s(log_s n) / 2.  The scan covers [1, min(n-1, 8 log_s n)]
    and verifies the objective is rising again at the right edge.
    """
    if n < 3:
        raise InputError(f"need n >= 3, got {n}")
    s = float(signal_ratio_base(float(p)))
    logs_n = math.log(n) / math.log(s)
    closed = logs_n - math.log(logs_n) / math.log(s) / 2.0
    a_max = min(n - 1, max(8, math.ceil(8.0 * logs_n)))
    best_a, best_v = 1, None
    values = []
    for a in range(1, a_max + 1):
        v = layer_expected_wrong((a, n - a), p, STRICT)
        values.append(v)
        if best_v is None or v < best_v:
            best_a, best_v = a, v
    if a_max < n - 1 and values[-1] < values[-3]:
        raise RuntimeError("two-layer scan bound too small: objective still falling at the edge")
    return best_a, best_v, closed


def optimal_layers_exact(
    n: int,
    p: Number,
    window: int = 3,
    semantics: str = POOLED_CARRY,
) -> tuple[LayerDesign, Number]:
    """Design minimizing layer_expected_wrong, by increasing-n dynamic programming.

    State is (remaining nodes, pooled carry).  The first-layer scan is a
    window around the previous size's optimum (the optima drift by at most
    one as n grows); whenever the window minimum lands on a window edge the
    window widens until the minimum is interior, so the result stays exact
    even where the drift claim fails.  Ties prefer the larger first layer.
    """
    if n < 1:
        raise InputError(f"need n >= 1, got {n}")
    if semantics != POOLED_CARRY:
        raise InputError("the layer DP optimizes pooled-carry semantics only")
    exact = isinstance(p, Fraction)
    zero = Fraction(0) if exact else 0.0
    probs = _probs_cache(p)
    value = [[zero, zero] for _ in range(n + 1)]
    first = [[0, 0] for _ in range(n + 1)]
    prev_best = [1, 1]
    for m in range(1, n + 1):
        for carry in (0, 1):
            lo = max(1, prev_best[carry] - window)
            hi = min(m, prev_best[carry] + window)
            while True:
                best_v, best_a = None, -1
                for a in range(hi, lo - 1, -1):
                    pool = probs(a + carry)
                    v = a * (1 - p) + pool.p_wrong * (m - a) + pool.p_none * value[m - a][(a + carry) % 2]
                    if best_v is None or v < best_v:
                        best_v, best_a = v, a
                widen = (best_a == lo and lo > 1) or (best_a == hi and hi < m)
                if not widen:
                    break
                lo, hi = max(1, lo - window), min(m, hi + window)
            value[m][carry] = best_v
            first[m][carry] = best_a
            prev_best[carry] = best_a
    sizes = []
    m, carry = n, 0
    while m > 0:
        a = first[m][carry]
        sizes.append(a)
        m, carry = m - a, (a + carry) % 2
    return LayerDesign(tuple(sizes)), value[n][0]


def asymptotic_layers(n: int, p: Number) -> LayerDesign:
    """Log-sized layer construction: layer i holds about log_s of the remaining mass.

    a_1 = round(log_s n); each later size re-evaluates the log at what is
    left, which reproduces the recursion size_i ~ log_s(s^{size_{i-1}} -
    size_{i-1}) since s^{log_s m} = m.  Sizes are clamped non-increasing
    and the final layer absorbs the remainder.
    """
    p = float(p)
    s = signal_ratio_base(p)
    ln_s = math.log(s)
    if math.log(n) / ln_s < 2.0:
        raise InputError(f"n = {n} too small for an asymptotic design at p = {p}")
    sizes: list[int] = []
    mass = float(n)
    total = 0
    while total < n:
        a = max(1, round(math.log(mass) / ln_s)) if mass > 1.0 else 1
        if sizes:
            a = min(a, sizes[-1])
        a = min(a, n - total)
        sizes.append(a)
        total += a
        mass -= a
    return LayerDesign(tuple(sizes))


def build_layer_topology(design: LayerDesign | Sequence[int]) -> Topology:
    """Nodes numbered layer by layer; each node observes exactly the previous layer."""
    sizes = design.sizes if isinstance(design, LayerDesign) else tuple(design)
    LayerDesign(sizes)
    neighbors: list[tuple[int, ...]] = []
    start = 1
    prev: tuple[int, ...] = ()
    for a in sizes:
        for _ in range(a):
            neighbors.append(prev)
        prev = tuple(range(start, start + a))
        start += a
    return Topology(sum(sizes), tuple(neighbors))


def read_layer_spec(path: str) -> LayerDesign:
    """Layer-spec file: one line of comma-separated sizes."""
    with open(path, "r", encoding="utf-8") as fh:
        content = fh.read().strip()
    if not content:
        raise InputError("empty layer-spec file", line=1)
    try:
        sizes = tuple(int(tok) for tok in content.split(","))
    except ValueError:
        raise InputError(f"unparsable layer sizes {content!r}", line=1) from None
    try:
        return LayerDesign(sizes)
    except InputError as exc:
        raise InputError(str(exc), line=1) from None
