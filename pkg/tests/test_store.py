"""Roster persistence: CRUD, optimistic versioning, crash and quota behavior."""

import numpy as np
import pytest

import peerplan.store
from peerplan import (
    CapacityBounds,
    ConflictingUpdate,
    LnsConfig,
    ModelParams,
    NotFound,
    RosterStore,
    SolveConstraints,
    StorageFull,
    solve_lns,
)
from conftest import random_network


@pytest.fixture
def store(tmp_path):
    return RosterStore(tmp_path / "data")


def _network(seed=401, n=8):
    return random_network(np.random.default_rng(seed), n)


def _result(network, seed=0):
    params = ModelParams(capacity=CapacityBounds(3, 5))
    return solve_lns(network, params, LnsConfig(restarts=2, stall_limit=15, seed=seed))


def test_create_get_list_delete(store):
    network = _network()
    roster = store.create("tuesday cohort", network)
    assert roster.version == 1
    assert roster.history == ()
    loaded = store.get(roster.id)
    assert loaded.name == "tuesday cohort"
    assert loaded.network.nodes == network.nodes
    assert loaded.network.arcs == network.arcs

    other = store.create("wednesday cohort", _network(seed=402))
    summaries = store.list_rosters()
    assert {s["id"] for s in summaries} == {roster.id, other.id}
    summary = next(s for s in summaries if s["id"] == roster.id)
    assert summary["nodes"] == 8
    assert summary["users"] == network.user_count()
    assert summary["version"] == 1

    store.delete(roster.id)
    assert {s["id"] for s in store.list_rosters()} == {other.id}
    with pytest.raises(NotFound):
        store.get(roster.id)


def test_update_bumps_version_and_checks_it(store):
    roster = store.create("alpha", _network())
    updated = store.update(roster.id, expected_version=1, name="beta")
    assert updated.version == 2
    assert updated.name == "beta"
    assert store.get(roster.id).name == "beta"
    with pytest.raises(ConflictingUpdate):
        store.update(roster.id, expected_version=1, name="gamma")
    replacement = _network(seed=403, n=6)
    bumped = store.update(roster.id, expected_version=2, network=replacement)
    assert bumped.version == 3
    assert store.get(roster.id).network.nodes == replacement.nodes


def test_missing_rosters_raise_not_found(store):
    with pytest.raises(NotFound):
        store.get("nope")
    with pytest.raises(NotFound):
        store.update("nope", expected_version=1, name="x")
    with pytest.raises(NotFound):
        store.delete("nope")
    with pytest.raises(NotFound):
        store.get_result("nope", "r0")


def test_invalid_networks_are_refused(store):
    from peerplan import Arc, Node, SocialNetwork, TieStrength, Behavior

    broken = SocialNetwork(
        (Node("a", Behavior.USER),),
        (Arc("a", "ghost", TieStrength.WEAK),),
    )
    with pytest.raises(ValueError):
        store.create("bad", broken)
    roster = store.create("ok", _network())
    with pytest.raises(ValueError):
        store.update(roster.id, expected_version=1, network=broken)


def test_add_result_appends_history(store):
    network = _network()
    roster = store.create("solved", network)
    result = _result(network)
    constraints = SolveConstraints(pinned={sorted(network.node_ids())[0]: 0})
    updated, result_id = store.add_result(roster.id, result, constraints)
    assert updated.version == 2
    assert len(updated.history) == 1
    entry = updated.history[0]
    assert entry.result_id == result_id
    assert entry.algorithm == "lns"
    assert entry.constraints == constraints

    doc = store.get_result(roster.id, result_id)
    assert doc["roster_id"] == roster.id
    assert doc["result_id"] == result_id
    assert doc["result"]["algorithm"] == "lns"
    assert doc["constraints"]["pinned"] == constraints.pinned
    with pytest.raises(NotFound):
        store.get_result(roster.id, "r-missing")

    # History survives a reload from disk.
    reloaded = RosterStore(store.data_dir).get(roster.id)
    assert reloaded.history == updated.history


def test_delete_removes_results_too(store, tmp_path):
    network = _network()
    roster = store.create("doomed", network)
    _, result_id = store.add_result(roster.id, _result(network), SolveConstraints())
    results_dir = store.data_dir / "results" / roster.id
    assert any(results_dir.glob("*.json"))
    store.delete(roster.id)
    assert not results_dir.exists()
    with pytest.raises(NotFound):
        store.get_result(roster.id, result_id)


def test_interrupted_write_leaves_the_old_document(store, monkeypatch):
    roster = store.create("durable", _network())

    def explode(src, dst):
        raise OSError("simulated crash mid-replace")

    monkeypatch.setattr(peerplan.store.os, "replace", explode)
    with pytest.raises(OSError):
        store.update(roster.id, expected_version=1, name="lost")
    monkeypatch.undo()

    survivor = store.get(roster.id)
    assert survivor.name == "durable"
    assert survivor.version == 1
    # The aborted temp file must not linger.
    assert not list(store.data_dir.rglob("*.tmp"))


def test_storage_quota(tmp_path):
    store = RosterStore(tmp_path / "data", max_bytes=4096)
    store.create("fits", _network(n=6))
    with pytest.raises(StorageFull):
        store.create("overflows", _network(seed=404, n=40))
    # The failed create must not leave a partial roster behind.
    assert len(store.list_rosters()) == 1


def test_quota_counts_replaced_files_once(tmp_path):
    store = RosterStore(tmp_path / "data", max_bytes=4096)
    roster = store.create("resize", _network(n=6))
    # Rewriting the same roster stays within quota even near the cap.
    for version in range(1, 4):
        roster = store.update(roster.id, expected_version=version, name=f"resize{version}")
    assert store.get(roster.id).version == 4


def test_ids_are_distinct(store):
    ids = {store.create(f"r{k}", _network(seed=500 + k, n=5)).id for k in range(8)}
    assert len(ids) == 8
