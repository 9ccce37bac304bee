"""Hot numeric kernels: numba @njit versions plus pure-numpy twins.

Dispatch happens in the calling modules via `backend.use_numba()`.  The two
paths agree statistically but consume randomness differently (numba kernels
re-seed one legacy stream per replicate so results are independent of the
thread count; numpy twins draw replicate-vectorized from a single Philox
stream), so estimates are reproducible within a backend, not across them.

G(n, q) cascades are numpy-only in both backends: each node needs two
binomial draws with run-dependent counts up to n, and numba's scalar
binomial sampler costs O(count) per draw where numpy's vectorized sampler
is O(1) amortized.
"""
from __future__ import annotations

import numpy as np

from .backend import HAS_NUMBA

if HAS_NUMBA:
    from numba import njit, prange
else:  # pragma: no cover
    def njit(*args, **kwargs):
        def deco(fn):
            return fn
        return deco

    prange = range


def replicate_seeds(master_seed: int, stream: int, reps: int) -> np.ndarray:
    """Per-replicate uint32 seeds for numba kernels, derived from (master, stream).

    With ~1e5 replicates the chance of a colliding pair among 2^32 seeds is
    of order 1e-4 per pair-universe; an occasional duplicated replicate
    leaves the estimator unbiased and the run deterministic.
    """
    ss = np.random.SeedSequence(entropy=master_seed, spawn_key=(stream,))
    return ss.generate_state(reps, dtype=np.uint32)


def philox(master_seed: int, stream: int) -> np.random.Generator:
    """Counter-based generator for the numpy kernel path."""
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence(entropy=master_seed, spawn_key=(stream,)))
    )


# --------------------------------------------------------------------------
# complete graph, majority rule
# --------------------------------------------------------------------------

@njit(cache=True, parallel=True)
def complete_majority_nb(n, p, seeds):  # pragma: no cover - exercised via dispatch
    wrong = np.empty(seeds.size, dtype=np.int64)
    for r in prange(seeds.size):
        np.random.seed(seeds[r])
        diff_all = 0  # signed diff of all decisions, truth at +1
        wr = 0
        for _ in range(n):
            sig = 1 if np.random.random() < p else -1
            aug = diff_all + sig
            dec = sig if aug == 0 else (1 if aug > 0 else -1)
            if dec < 0:
                wr += 1
            diff_all += dec
        wrong[r] = wr
    return wrong


def complete_majority_np(n, p, reps, rng):
    diff_all = np.zeros(reps, dtype=np.int64)
    wrong = np.zeros(reps, dtype=np.int64)
    for _ in range(n):
        sig = np.where(rng.random(reps) < p, 1, -1).astype(np.int64)
        aug = diff_all + sig
        dec = np.where(aug == 0, sig, np.sign(aug))
        wrong += dec < 0
        diff_all += dec
    return wrong


# --------------------------------------------------------------------------
# complete graph, reveal-threshold strategy
# --------------------------------------------------------------------------

@njit(cache=True, parallel=True)
def complete_threshold_nb(n, p, delta, seeds):  # pragma: no cover
    wrong = np.empty(seeds.size, dtype=np.int64)
    for r in prange(seeds.size):
        np.random.seed(seeds[r])
        vdiff = 0  # signed diff over valid decisions
        adiff = 0  # signed diff over all decisions
        wr = 0
        for i in range(1, n + 1):
            sig = 1 if np.random.random() < p else -1
            if abs(vdiff) < delta[i]:
                dec = sig
                vdiff += sig
            else:
                dec = 1 if adiff > 0 else -1
            if dec < 0:
                wr += 1
            adiff += dec
        wrong[r] = wr
    return wrong


def complete_threshold_np(n, p, delta, reps, rng):
    vdiff = np.zeros(reps, dtype=np.int64)
    adiff = np.zeros(reps, dtype=np.int64)
    wrong = np.zeros(reps, dtype=np.int64)
    for i in range(1, n + 1):
        sig = np.where(rng.random(reps) < p, 1, -1).astype(np.int64)
        reveal = np.abs(vdiff) < delta[i]
        dec = np.where(reveal, sig, np.where(adiff > 0, 1, -1))
        vdiff += np.where(reveal, sig, 0)
        adiff += dec
        wrong += dec < 0
    return wrong


# --------------------------------------------------------------------------
# layer graphs, majority rule (strict visibility: each layer sees only the
# previous layer's outputs; a cascade dies crossing a size-1 layer)
# --------------------------------------------------------------------------

@njit(cache=True, parallel=True)
def layers_majority_nb(sizes, p, seeds):  # pragma: no cover
    wrong = np.empty(seeds.size, dtype=np.int64)
    for r in prange(seeds.size):
        np.random.seed(seeds[r])
        mode = 0  # 0 reveal, 1 cascade-correct, 2 cascade-wrong
        wr = 0
        for j in range(sizes.size):
            a = sizes[j]
            if mode == 0:
                k = np.random.binomial(a, p)
                wr += a - k
                d = 2 * k - a
                if d >= 2:
                    mode = 1
                elif d <= -2:
                    mode = 2
            elif mode == 1:
                mode = 1 if a >= 2 else 0
            else:
                wr += a
                mode = 2 if a >= 2 else 0
        wrong[r] = wr
    return wrong


def layers_majority_np(sizes, p, reps, rng):
    mode = np.zeros(reps, dtype=np.int8)
    wrong = np.zeros(reps, dtype=np.int64)
    for a in sizes:
        a = int(a)
        k = rng.binomial(a, p, size=reps)
        reveal = mode == 0
        wrong += np.where(reveal, a - k, np.where(mode == 2, a, 0))
        d = 2 * k - a
        after_reveal = np.where(d >= 2, 1, np.where(d <= -2, 2, 0)).astype(np.int8)
        if a >= 2:
            mode = np.where(reveal, after_reveal, mode)
        else:
            mode = np.where(reveal, after_reveal, 0).astype(np.int8)
    return wrong


# --------------------------------------------------------------------------
# G(n, q), majority rule, graph resampled per replicate (annealed): node i's
# correct/wrong neighbor counts are independent Binomial(C, q), Binomial(W, q)
# given the earlier decision tallies, which is exactly a fresh G(n, q).
# --------------------------------------------------------------------------

def gnq_majority_np(n, q, p, reps, rng):
    C = np.zeros(reps, dtype=np.int64)
    W = np.zeros(reps, dtype=np.int64)
    wrong = np.zeros(reps, dtype=np.int64)
    for _ in range(n):
        cn = rng.binomial(C, q)
        wn = rng.binomial(W, q)
        sig = np.where(rng.random(reps) < p, 1, -1).astype(np.int64)
        aug = cn - wn + sig
        correct = (aug > 0) | ((aug == 0) & (sig > 0))
        wrong += ~correct
        C += correct
        W += ~correct
    return wrong


def empty_np(n, p, reps, rng):
    return rng.binomial(n, 1.0 - p, size=reps).astype(np.int64)


def forced_prefix_np(n_correct, n_wrong, q, p, reps, rng):
    """Failure indicator of the node after a forced prefix, per replicate."""
    cn = rng.binomial(n_correct, q, size=reps)
    wn = rng.binomial(n_wrong, q, size=reps)
    sig = np.where(rng.random(reps) < p, 1, -1).astype(np.int64)
    aug = cn - wn + sig
    correct = (aug > 0) | ((aug == 0) & (sig > 0))
    return (~correct).astype(np.int64)


# --------------------------------------------------------------------------
# banded backward sweep for the optimal reveal thresholds
# --------------------------------------------------------------------------
#
# F(m, d) = expected wrong among the m remaining nodes (current included)
# given |valid diff| = d, after subtracting the action-independent expected
# wrong of the already-decided prefix.  Majority is terminal with value
# (1 - w(d)) * m; reveal steps to F(m-1, d +/- 1).  Only a band of width
# O(max delta) above d = 0 is ever needed; cells at the band edge sit in
# the majority region where the closed form applies.

@njit(cache=True)
def delta_band_nb(n, p, w, q1, tol):  # pragma: no cover
    band = w.size - 1
    F_next = np.zeros(band + 1)
    F_cur = np.zeros(band + 1)
    reveal = np.zeros(band + 1, dtype=np.bool_)
    delta = np.zeros(n + 1, dtype=np.int64)
    edge_hit = False
    reveal[0] = True
    for m in range(1, n + 1):
        F_cur[0] = (1.0 - p) + F_next[1]
        for d in range(1, band):
            R = (1.0 - p) + q1[d] * F_next[d + 1] + (1.0 - q1[d]) * F_next[d - 1]
            M = (1.0 - w[d]) * m
            if M - R > tol:
                F_cur[d] = R
                reveal[d] = True
            else:
                F_cur[d] = M
                reveal[d] = False
        F_cur[band] = (1.0 - w[band]) * m
        if reveal[band - 1] or reveal[band - 2] or reveal[band - 3]:
            edge_hit = True
        i = n - m + 1
        par = (i - 1) & 1
        top = band - 1 if i - 1 > band - 1 else i - 1
        if (top & 1) != par:
            top -= 1
        best = -1
        d = top
        while d >= par:
            if reveal[d]:
                best = d
                break
            d -= 2
        delta[i] = best + 1
        F_next, F_cur = F_cur, F_next
    return delta, F_next[0], edge_hit


def delta_band_np(n, p, w, q1, tol):
    band = w.size - 1
    F_next = np.zeros(band + 1)
    delta = np.zeros(n + 1, dtype=np.int64)
    edge_hit = False
    one_m_p = 1.0 - p
    q1b = q1[1:band]
    wb = w[1:band]
    for m in range(1, n + 1):
        F_cur = np.empty(band + 1)
        F_cur[0] = one_m_p + F_next[1]
        R = one_m_p + q1b * F_next[2 : band + 1] + (1.0 - q1b) * F_next[0 : band - 1]
        M = (1.0 - wb) * m
        rev = (M - R) > tol
        F_cur[1:band] = np.where(rev, R, M)
        F_cur[band] = (1.0 - w[band]) * m
        if rev[band - 2] or rev[band - 3] or rev[band - 4]:
            edge_hit = True
        i = n - m + 1
        par = (i - 1) & 1
        top = min(i - 1, band - 1)
        if (top & 1) != par:
            top -= 1
        best = -1
        d = top
        while d >= par:
            if d == 0 or rev[d - 1]:
                best = d
                break
            d -= 2
        delta[i] = best + 1
        F_next = F_cur
    return delta, F_next[0], edge_hit
