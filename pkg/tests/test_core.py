"""Core engine: majority rule, posteriors, validity bookkeeping, trace runs."""
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from cascade_lab import (
    ALWAYS_REVEAL,
    MAJORITY,
    MAJORITY_PROFILE,
    REVEAL_PROFILE,
    CustomRule,
    InputError,
    SignalModel,
    StrategyProfile,
    Topology,
    is_revealing,
    majority_decide,
    posterior_truth_given_diff,
    read_edge_list,
    run_sequence,
    signed_diff,
    valid_subsequence,
)


def test_majority_examples():
    assert majority_decide([1, 1], 0) == 1
    assert majority_decide([1], 0) == 0  # one neighbor + opposite signal ties
    assert majority_decide([], 1) == 1
    assert majority_decide([0, 0, 1], 1) == 1  # augmented tie resolves to the signal
    assert majority_decide([0, 0, 0], 1) == 0


@given(st.integers(0, 6), st.integers(0, 1))
def test_tie_passes_signal_through(k, s):
    votes = [1] * k + [0] * k
    assert majority_decide(votes, s) == s


def test_signed_diff_examples():
    assert signed_diff([1, 0, 1]) == 1
    assert signed_diff([]) == 0
    assert signed_diff([0, 0, 1, 0]) == -2


def test_posterior_examples():
    assert posterior_truth_given_diff(Fraction(2, 3), 0) == Fraction(1, 2)
    assert posterior_truth_given_diff(Fraction(2, 3), 2) == Fraction(4, 5)
    for p in (Fraction(3, 5), Fraction(2, 3), Fraction(9, 10)):
        assert posterior_truth_given_diff(p, 1) == p


@given(st.floats(0.51, 0.99), st.integers(-30, 30))
def test_posterior_identity_and_symmetry(p, d):
    f = posterior_truth_given_diff(p, d)
    ratio = ((1 - p) / p) ** d
    assert abs(f * ratio - (1 - f)) < 1e-12
    assert abs(f + posterior_truth_given_diff(p, -d) - 1) < 1e-12


def test_posterior_strictly_increasing():
    vals = [posterior_truth_given_diff(0.7, d) for d in range(-10, 11)]
    assert all(a < b for a, b in zip(vals, vals[1:]))


def test_is_revealing():
    assert is_revealing(MAJORITY, 3, (1, 0))  # tied votes pass the signal through
    assert not is_revealing(MAJORITY, 3, (1, 1))
    assert is_revealing(ALWAYS_REVEAL, 5, (1, 1, 1, 0))


def test_run_sequence_hand_traces():
    complete3 = Topology.complete(3)
    t = run_sequence(complete3, MAJORITY_PROFILE, (1, 0, 1))
    assert t.decisions == (1, 0, 1) and t.valid_mask == (True, True, True)
    t = run_sequence(complete3, MAJORITY_PROFILE, (1, 1, 0))
    assert t.decisions == (1, 1, 1) and t.valid_mask == (True, True, False)
    for profile in (MAJORITY_PROFILE, REVEAL_PROFILE):
        t = run_sequence(Topology.empty(4), profile, (0, 1, 1, 0))
        assert t.decisions == (0, 1, 1, 0) and all(t.valid_mask)


def test_run_sequence_rejects_bad_signals():
    with pytest.raises(InputError):
        run_sequence(Topology.empty(3), MAJORITY_PROFILE, (1, 0))
    with pytest.raises(InputError):
        run_sequence(Topology.empty(2), MAJORITY_PROFILE, (1, 2))


def test_valid_subsequence():
    t = run_sequence(Topology.complete(3), MAJORITY_PROFILE, (1, 1, 0))
    assert valid_subsequence(t) == (1, 1)
    t = run_sequence(Topology.complete(4), MAJORITY_PROFILE, (0, 0, 1, 1))
    assert t.decisions == (0, 0, 0, 0)
    assert valid_subsequence(t) == (0, 0)


@given(st.lists(st.integers(0, 1), min_size=1, max_size=9), st.integers(0, 3))
def test_bit_flip_symmetry(signals, topo_pick):
    n = len(signals)
    topo = [Topology.empty(n), Topology.complete(n)][topo_pick % 2]
    profile = [MAJORITY_PROFILE, REVEAL_PROFILE][topo_pick // 2]
    t = run_sequence(topo, profile, signals)
    flipped = run_sequence(topo, profile, [1 - s for s in signals])
    assert flipped.decisions == tuple(1 - c for c in t.decisions)
    assert flipped.valid_mask == t.valid_mask


@given(st.lists(st.integers(0, 1), min_size=1, max_size=8))
def test_validity_soundness(signals):
    """Flipping the signal of a valid node flips exactly its decision, prefix fixed."""
    n = len(signals)
    topo = Topology.complete(n)
    t = run_sequence(topo, MAJORITY_PROFILE, signals)
    for i in range(1, n + 1):
        if not t.valid_mask[i - 1]:
            continue
        observed = t.decisions[: i - 1]
        rule = MAJORITY_PROFILE.rule_for(i)
        assert rule.decide(observed, 1 - signals[i - 1], i) == 1 - t.decisions[i - 1]


def test_custom_rule_and_per_node_profile():
    contrarian = CustomRule(lambda obs, s, i: 1 - majority_decide(obs, s))
    profile = StrategyProfile.per_node([ALWAYS_REVEAL, contrarian])
    t = run_sequence(Topology.complete(2), profile, (1, 1))
    assert t.decisions == (1, 0)
    assert t.valid_mask == (True, False)


def test_signal_model_validation():
    SignalModel(0.7)
    with pytest.raises(InputError):
        SignalModel(0.5)
    with pytest.raises(InputError):
        SignalModel(1.0)
    with pytest.raises(InputError):
        SignalModel(0.8, ground_truth=2)


def test_topology_validation():
    with pytest.raises(InputError):
        Topology(2, ((), (2,)))  # self/forward reference
    with pytest.raises(InputError):
        Topology(2, ((), (1, 1)))  # duplicate
    with pytest.raises(InputError):
        Topology.from_edges(3, [(1, 2), (1, 2)])
    topo = Topology.from_edges(3, [(1, 3), (2, 3)])
    assert topo.earlier_neighbors(3) == (1, 2)
    assert topo.edge_count() == 2


def test_edge_list_io(tmp_path):
    good = tmp_path / "g.txt"
    good.write_text("3\n1 3\n2 3\n", encoding="utf-8")
    topo = read_edge_list(str(good))
    assert topo.n == 3 and topo.earlier_neighbors(3) == (1, 2)

    dup = tmp_path / "dup.txt"
    dup.write_text("3\n1 3\n1 3\n", encoding="utf-8")
    with pytest.raises(InputError) as err:
        read_edge_list(str(dup))
    assert "line 3" in str(err.value)

    bad = tmp_path / "bad.txt"
    bad.write_text("3\n3 1\n", encoding="utf-8")
    with pytest.raises(InputError) as err:
        read_edge_list(str(bad))
    assert "line 2" in str(err.value)
