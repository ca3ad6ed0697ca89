import dataclasses

import numpy as np
import pytest

from peerplan import (
    Behavior,
    CapacityBounds,
    ModelParams,
    Partition,
    UnnormalizedInput,
    apply_intervention,
    evaluate_partition,
    expected_nonusers,
    flip_profile,
    simulate,
    success,
)
from peerplan.dynamics import WeightedNetwork, WeightedNode

from conftest import as_plain, pair_network, random_network
from oracles import naive_expected_nonusers, naive_success


def _params(lo=1, hi=8, facilitator=True):
    return ModelParams(capacity=CapacityBounds(lo, hi), include_facilitator=facilitator)


# Frozen worked-example values: 2-node pair, defaults.
PAIR_CASES = [
    ({"u": 0, "v": 0}, False, 0.8, -0.25),
    ({"u": 0, "v": 0}, True, 1.55, 0.6875),
    ({"u": 0, "v": 1}, False, 1.0, 0.0),
    ({"u": 0, "v": 1}, True, 1.8, 1.0),
]


def test_pair_worked_examples():
    for assignment, facilitator, want_expected, want_success in PAIR_CASES:
        params = _params(facilitator=facilitator)
        weighted = apply_intervention(pair_network(), Partition(assignment), params)
        expected = expected_nonusers(weighted, params)
        assert expected == pytest.approx(want_expected, abs=1e-12)
        assert success(pair_network(), expected, params) == pytest.approx(want_success, abs=1e-12)


def test_evaluate_partition_bundles_everything():
    params = _params(facilitator=False)
    partition = Partition({"u": 0, "v": 0})
    evaluation = evaluate_partition(pair_network(), partition, params)
    assert evaluation.expected_nonusers == pytest.approx(0.8, abs=1e-12)
    assert evaluation.success == pytest.approx(-0.25, abs=1e-12)
    assert evaluation.partition_echo == partition
    assert evaluation.flips["u"].become_nonuser == pytest.approx(0.8)
    assert evaluation.flips["u"].become_user == 0.0
    assert evaluation.flips["v"].become_user == pytest.approx(1.0)


def test_closed_form_matches_naive_oracle():
    rng = np.random.default_rng(21)
    for _ in range(25):
        n = int(rng.integers(2, 12))
        network = random_network(rng, n, arc_prob=float(rng.uniform(0.1, 0.6)))
        groups = max(1, n // 3)
        assignment = {node.id: k % groups for k, node in enumerate(network.nodes)}
        for facilitator in (True, False):
            params = _params(facilitator=facilitator)
            weighted = apply_intervention(network, Partition(assignment), params)
            got = expected_nonusers(weighted, params)
            nodes, arcs = as_plain(network)
            want = naive_expected_nonusers(nodes, arcs, assignment, facilitator=facilitator)
            assert got == pytest.approx(want, abs=1e-12)
            got_success = success(network, got, params)
            assert got_success == pytest.approx(
                naive_success(want, network.user_count(), network.nonuser_count()), abs=1e-12)


def test_success_is_zero_without_users():
    from peerplan import Node, SocialNetwork
    allnon = SocialNetwork(
        nodes=(Node("a", Behavior.NON_USER), Node("b", Behavior.NON_USER)), arcs=())
    params = _params()
    assert success(allnon, 2.0, params) == 0.0
    evaluation = evaluate_partition(allnon, Partition({"a": 0, "b": 0}), params)
    assert evaluation.expected_nonusers == pytest.approx(2.0)
    assert evaluation.success == 0.0


def test_success_never_exceeds_one():
    rng = np.random.default_rng(33)
    for _ in range(20):
        network = random_network(rng, int(rng.integers(2, 10)))
        groups = max(1, len(network.nodes) // 4)
        partition = Partition({node.id: k % groups for k, node in enumerate(network.nodes)})
        evaluation = evaluate_partition(network, partition, _params())
        assert evaluation.success <= 1.0 + 1e-12


def test_flip_profile_sides():
    params = _params()
    weighted = apply_intervention(pair_network(), Partition({"u": 0, "v": 0}), params)
    profile = flip_profile(weighted, params)
    assert set(profile) == {"u", "v"}
    assert profile["u"].become_user == 0.0
    # u's incoming mass is all from non-users (v 0.5, facilitator 0.5).
    assert profile["u"].become_nonuser == pytest.approx(0.8)
    assert profile["v"].become_nonuser == 0.0
    assert profile["v"].become_user == pytest.approx(0.25)


def test_unnormalized_input_guard():
    nodes = (WeightedNode("a", Behavior.USER), WeightedNode("b", Behavior.NON_USER))
    bad = WeightedNetwork(nodes=nodes, weights={("a", "b"): 0.7})
    with pytest.raises(UnnormalizedInput):
        expected_nonusers(bad, ModelParams())
    with pytest.raises(UnnormalizedInput):
        simulate(bad, ModelParams(), sample_count=10, seed=0)
    # exact zero and exact one are both fine
    ok = WeightedNetwork(nodes=nodes, weights={("a", "b"): 1.0})
    expected_nonusers(ok, ModelParams())


def test_simulate_matches_closed_form_on_pair():
    params = _params()
    weighted = apply_intervention(pair_network(), Partition({"u": 0, "v": 0}), params)
    closed = expected_nonusers(weighted, params)
    outcome = simulate(weighted, params, sample_count=200_000, seed=17)
    assert outcome.sample_count == 200_000
    assert outcome.clamp_events == 0
    assert abs(outcome.mean - closed) <= 4.0 * outcome.std_error
    assert 0.0 < outcome.std_error < 0.01


def test_simulate_depends_only_on_seed_and_count():
    params = _params()
    weighted = apply_intervention(pair_network(), Partition({"u": 0, "v": 0}), params)
    a = simulate(weighted, params, sample_count=10_000, seed=3)
    b = simulate(weighted, params, sample_count=10_000, seed=3)
    c = simulate(weighted, params, sample_count=10_000, seed=4)
    assert a == b
    assert a.mean != c.mean


def test_simulate_block_boundaries():
    # sample counts straddling the internal block size agree with a
    # straight recomputation of mean/std over the same draws
    params = _params()
    weighted = apply_intervention(pair_network(), Partition({"u": 0, "v": 0}), params)
    for count in (1, 2, 8191, 8192, 8193, 20000):
        outcome = simulate(weighted, params, sample_count=count, seed=9)
        assert outcome.sample_count == count
        assert 0.0 <= outcome.mean <= 2.0
        if count == 1:
            assert outcome.std_error == 0.0


def test_simulate_extremes_are_deterministic():
    # flip probabilities 0 and 1 pin the outcome exactly
    network = pair_network()
    partition = Partition({"u": 0, "v": 0})
    sure = dataclasses.replace(_params(facilitator=False), flip_to_user=1.0, flip_to_nonuser=1.0)
    weighted = apply_intervention(network, partition, sure)
    outcome = simulate(weighted, sure, sample_count=500, seed=1)
    # both nodes always exceed (weight 1 each) and always flip: count stays 1
    assert outcome.mean == pytest.approx(1.0)
    assert outcome.std_error == 0.0

    never = dataclasses.replace(_params(facilitator=False), flip_to_user=0.0, flip_to_nonuser=0.0)
    weighted = apply_intervention(network, partition, never)
    outcome = simulate(weighted, never, sample_count=500, seed=1)
    assert outcome.mean == pytest.approx(1.0)


def test_simulate_rejects_empty_sample():
    params = _params()
    weighted = apply_intervention(pair_network(), Partition({"u": 0, "v": 0}), params)
    with pytest.raises(ValueError):
        simulate(weighted, params, sample_count=0, seed=0)
