"""HTTP API: endpoint flows, error envelope, and the no-show re-solve."""

import numpy as np
import pytest
from fastapi.testclient import TestClient

from peerplan import (
    CapacityBounds,
    LnsConfig,
    ModelParams,
    SolveConstraints,
    solve_lns,
)
from peerplan.fileio import network_to_obj
from peerplan.service import create_app
from conftest import pair_network, random_network


@pytest.fixture
def client(tmp_path):
    app = create_app(tmp_path / "data", default_seed=0)
    with TestClient(app, raise_server_exceptions=False) as c:
        yield c


def _roster_payload(seed=601, n=9, name="unit"):
    network = random_network(np.random.default_rng(seed), n)
    return network, {"name": name, "network": network_to_obj(network)}


def _pair_payload():
    return {"name": "pair", "network": network_to_obj(pair_network())}


def test_healthz(client):
    response = client.get("/healthz")
    assert response.status_code == 200
    assert response.json() == {"status": "ok"}


def test_roster_crud_flow(client):
    network, payload = _roster_payload()
    created = client.post("/rosters", json=payload)
    assert created.status_code == 201
    roster = created.json()
    assert roster["version"] == 1
    assert roster["history"] == []
    roster_id = roster["id"]

    assert client.get(f"/rosters/{roster_id}").json()["name"] == "unit"
    listing = client.get("/rosters").json()["rosters"]
    assert [r["id"] for r in listing] == [roster_id]
    assert listing[0]["nodes"] == 9

    renamed = client.put(f"/rosters/{roster_id}", json={"version": 1, "name": "renamed"})
    assert renamed.status_code == 200
    assert renamed.json()["version"] == 2

    stale = client.put(f"/rosters/{roster_id}", json={"version": 1, "name": "too-late"})
    assert stale.status_code == 409
    assert stale.json()["code"] == "conflict"

    gone = client.delete(f"/rosters/{roster_id}")
    assert gone.status_code == 204
    assert client.get(f"/rosters/{roster_id}").status_code == 404
    assert client.get(f"/rosters/{roster_id}").json()["code"] == "not_found"


def test_create_roster_input_validation(client):
    assert client.post("/rosters", json={"network": {"nodes": [], "ties": []}}).status_code == 422
    response = client.post("/rosters", json={"name": "x", "network": {
        "nodes": [{"id": "a", "behavior": "user"}],
        "ties": [{"from": "a", "to": "ghost", "strength": "weak"}],
    }})
    assert response.status_code == 422
    assert response.json()["code"] == "bad_input"
    malformed = client.post("/rosters", content=b"not json",
                            headers={"content-type": "application/json"})
    assert malformed.status_code == 422
    assert malformed.json()["code"] == "bad_input"
    assert client.put("/rosters/xyz", json={"name": "no version"}).status_code == 422


def test_solve_and_fetch_result(client):
    created = client.post("/rosters", json=_pair_payload()).json()
    roster_id = created["id"]
    body = {
        "algo": "exact",
        "params": {"capacity": {"lo": 1, "hi": 2}, "include_facilitator": False},
    }
    response = client.post(f"/rosters/{roster_id}/solve", json=body)
    assert response.status_code == 200
    result = response.json()
    assert result["algorithm"] == "exact"
    # Separate singletons beat the pair: nobody flips either way.
    assert result["evaluation"]["expected_nonusers"] == pytest.approx(1.0)
    assert result["evaluation"]["success"] == pytest.approx(0.0)
    assert result["deviancy_warning"] is False
    assert result["roster_version"] == 2
    groups = result["partition"]["assignment"]
    assert groups["u"] != groups["v"]

    fetched = client.get(f"/rosters/{roster_id}/results/{result['result_id']}")
    assert fetched.status_code == 200
    doc = fetched.json()
    assert doc["result"]["partition"]["assignment"] == groups
    assert doc["deviancy_warning"] is False
    assert doc["constraints"] == {
        "pinned": {}, "must_link": [], "cannot_link": [], "frozen_groups": [],
    }

    roster = client.get(f"/rosters/{roster_id}").json()
    assert [h["result_id"] for h in roster["history"]] == [result["result_id"]]
    assert client.get(f"/rosters/{roster_id}/results/r-no-such").status_code == 404


def test_forced_together_pair_warns(client):
    created = client.post("/rosters", json=_pair_payload()).json()
    body = {
        "algo": "exact",
        "params": {"capacity": {"lo": 1, "hi": 2}, "include_facilitator": False},
        "constraints": {"must_link": [["u", "v"]]},
    }
    result = client.post(f"/rosters/{created['id']}/solve", json=body).json()
    assert result["evaluation"]["success"] < 0
    assert result["deviancy_warning"] is True


def test_solve_input_validation(client):
    network, payload = _roster_payload(seed=607)
    roster_id = client.post("/rosters", json=payload).json()["id"]

    for body, code in (
        ({"algo": "simplex"}, "bad_input"),
        ({"seed": "seven"}, "bad_input"),
        ({"restarts": 2.5}, "bad_input"),
        ({"absent": ["ghost"]}, "bad_input"),
        ({"params": {"capacity": {"lo": 5, "hi": 2}}}, "bad_input"),
    ):
        response = client.post(f"/rosters/{roster_id}/solve", json=body)
        assert response.status_code == 422, body
        assert response.json()["code"] == code

    # Structurally impossible constraints are a conflict, not bad input.
    ids = sorted(network.node_ids())
    unsat = {"constraints": {
        "must_link": [[ids[0], ids[1]]],
        "cannot_link": [[ids[0], ids[1]]],
    }}
    response = client.post(f"/rosters/{roster_id}/solve", json=unsat)
    assert response.status_code == 409
    assert response.json()["code"] == "unsatisfiable_constraints"

    # Capacity that fits no group count is infeasible.
    response = client.post(f"/rosters/{roster_id}/solve",
                           json={"params": {"capacity": {"lo": 4, "hi": 4}}})
    assert response.status_code == 422
    assert response.json()["code"] == "infeasible"

    assert client.post("/rosters/none/solve", json={}).status_code == 404


def test_baselines_reject_constraints(client):
    network, payload = _roster_payload(seed=613)
    roster_id = client.post("/rosters", json=payload).json()["id"]
    ids = sorted(network.node_ids())
    response = client.post(f"/rosters/{roster_id}/solve", json={
        "algo": "random",
        "constraints": {"pinned": {ids[0]: 0}},
        "params": {"capacity": {"lo": 2, "hi": 4}},
    })
    assert response.status_code == 422
    assert response.json()["code"] == "bad_input"
    clean = client.post(f"/rosters/{roster_id}/solve", json={
        "algo": "random", "params": {"capacity": {"lo": 2, "hi": 4}},
    })
    assert clean.status_code == 200
    assert clean.json()["algorithm"] == "random"


def test_evaluate_endpoint(client):
    created = client.post("/rosters", json=_pair_payload()).json()
    roster_id = created["id"]
    body = {
        "partition": {"assignment": {"u": 0, "v": 0}},
        "params": {"capacity": {"lo": 1, "hi": 2}, "include_facilitator": False},
    }
    response = client.post(f"/rosters/{roster_id}/evaluate", json=body)
    assert response.status_code == 200
    evaluation = response.json()
    assert evaluation["expected_nonusers"] == pytest.approx(0.8)
    assert evaluation["success"] == pytest.approx(-0.25)
    assert evaluation["deviancy_warning"] is True
    assert evaluation["partition"]["assignment"] == {"u": 0, "v": 0}

    assert client.post(f"/rosters/{roster_id}/evaluate", json={}).status_code == 422
    wrong_nodes = {"partition": {"assignment": {"u": 0}},
                   "params": {"capacity": {"lo": 1, "hi": 2}}}
    response = client.post(f"/rosters/{roster_id}/evaluate", json=wrong_nodes)
    assert response.status_code == 422
    assert response.json()["code"] == "infeasible"


def test_api_matches_direct_library_calls(client):
    network, payload = _roster_payload(seed=617, n=12)
    roster_id = client.post("/rosters", json=payload).json()["id"]
    body = {
        "algo": "lns", "seed": 7, "restarts": 3, "stall_limit": 25,
        "params": {"capacity": {"lo": 3, "hi": 5}},
    }
    via_api = client.post(f"/rosters/{roster_id}/solve", json=body).json()
    direct = solve_lns(
        network,
        ModelParams(capacity=CapacityBounds(3, 5)),
        LnsConfig(restarts=3, stall_limit=25, seed=7),
    )
    assert via_api["partition"]["assignment"] == direct.partition.assignment
    assert via_api["evaluation"]["success"] == pytest.approx(direct.evaluation.success)


def test_absent_resolve_keeps_survivors_in_place(client):
    network, payload = _roster_payload(seed=619, n=9)
    roster_id = client.post("/rosters", json=payload).json()["id"]
    ids = sorted(network.node_ids())
    layout = {node_id: k // 3 for k, node_id in enumerate(ids)}
    base_body = {
        "algo": "exact", "seed": 3,
        "params": {"capacity": {"lo": 2, "hi": 3}},
    }
    # Pinning every seat makes the solve a no-op echo of the layout.
    first = client.post(f"/rosters/{roster_id}/solve",
                        json={**base_body, "constraints": {"pinned": layout}}).json()
    before = first["partition"]["assignment"]
    assert before == layout

    # A no-show from a group above the size floor keeps everyone else seated.
    absent = ids[0]
    second = client.post(f"/rosters/{roster_id}/solve",
                         json={**base_body, "absent": [absent]}).json()
    after = second["partition"]["assignment"]
    assert absent not in after
    for node_id, group in after.items():
        assert group == before[node_id]

    # Client pins outrank the remembered seats (group 1 has slack to donate).
    survivor = ids[3]
    assert before[survivor] == 1
    third = client.post(f"/rosters/{roster_id}/solve", json={
        **base_body,
        "absent": [absent],
        "constraints": {"pinned": {survivor: 0}},
    }).json()
    assert third["partition"]["assignment"][survivor] == 0
    for node_id in ids[4:]:
        assert third["partition"]["assignment"][node_id] == before[node_id]

    # reoptimize drops the memory and just solves the reduced roster.
    fourth = client.post(f"/rosters/{roster_id}/solve",
                         json={**base_body, "absent": [absent], "reoptimize": True})
    assert fourth.status_code == 200
    assert absent not in fourth.json()["partition"]["assignment"]


def test_absent_resolve_conflicts_surface_as_409(client):
    # When the remembered seats cannot absorb the loss, the caller is told
    # instead of getting a silent reshuffle; reoptimize is the way out.
    network, payload = _roster_payload(seed=623, n=8)
    roster_id = client.post("/rosters", json=payload).json()["id"]
    ids = sorted(network.node_ids())
    layout = {node_id: k // 2 for k, node_id in enumerate(ids)}
    base_body = {"algo": "exact", "params": {"capacity": {"lo": 2, "hi": 3}}}
    client.post(f"/rosters/{roster_id}/solve",
                json={**base_body, "constraints": {"pinned": layout}})
    blocked = client.post(f"/rosters/{roster_id}/solve",
                          json={**base_body, "absent": [ids[0]]})
    assert blocked.status_code == 409
    assert blocked.json()["code"] == "unsatisfiable_constraints"
    retry = client.post(f"/rosters/{roster_id}/solve",
                        json={**base_body, "absent": [ids[0]], "reoptimize": True})
    assert retry.status_code == 200


def test_absent_without_history_solves_fresh(client):
    network, payload = _roster_payload(seed=621, n=8)
    roster_id = client.post("/rosters", json=payload).json()["id"]
    absent = sorted(network.node_ids())[0]
    response = client.post(f"/rosters/{roster_id}/solve", json={
        "algo": "lns", "seed": 1, "restarts": 2, "stall_limit": 20,
        "absent": [absent],
        "params": {"capacity": {"lo": 2, "hi": 4}},
    })
    assert response.status_code == 200
    assert absent not in response.json()["partition"]["assignment"]


def test_cross_origin_access_is_off_unless_enabled(tmp_path):
    origin = "http://localhost:5173"
    closed = TestClient(create_app(tmp_path / "closed"))
    response = closed.get("/healthz", headers={"Origin": origin})
    assert "access-control-allow-origin" not in response.headers

    open_app = create_app(tmp_path / "open", allow_origins=[origin])
    allowed = TestClient(open_app).get("/healthz", headers={"Origin": origin})
    assert allowed.headers["access-control-allow-origin"] == origin

    preflight = TestClient(open_app).options("/rosters", headers={
        "Origin": origin,
        "Access-Control-Request-Method": "POST",
        "Access-Control-Request-Headers": "content-type",
    })
    assert preflight.status_code == 200
    assert preflight.headers["access-control-allow-origin"] == origin

    other = TestClient(open_app).get("/healthz", headers={"Origin": "http://evil.test"})
    assert "access-control-allow-origin" not in other.headers
