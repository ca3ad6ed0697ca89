"""Drive the HTTP API end to end: roster, solve, no-shows, re-solve.

Runs the app in-process with a test client; `peerplan serve` exposes the
same routes over a real port.
"""

import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from peerplan.fileio import network_to_obj, read_network_file
from peerplan.service import create_app


def groups_of(doc):
    """Group members from a result's assignment map, for printing."""
    out = {}
    for node_id, index in sorted(doc["partition"]["assignment"].items()):
        out.setdefault(index, []).append(node_id)
    return [out[index] for index in sorted(out)]


net = read_network_file(Path(__file__).parent / "data" / "club12.json")
app = create_app(tempfile.mkdtemp())

with TestClient(app) as client:
    # Create a roster.  Every mutation bumps its version; updates must echo
    # the version they are based on, so concurrent editors cannot clobber
    # each other silently.
    created = client.post("/rosters", json={
        "name": "tuesday club",
        "network": network_to_obj(net),
    }).json()
    roster_id = created["id"]
    print(f"created roster {roster_id} version {created['version']}")

    # Ask for a grouping.  The response carries the result document plus a
    # result_id under which it stays fetchable.
    solved = client.post(f"/rosters/{roster_id}/solve", json={
        "algo": "lns",
        "seed": 7,
        "restarts": 10,
        "params": {"capacity": {"lo": 3, "hi": 6}},
    }).json()
    print(f"solved: success {solved['evaluation']['success']:.4f},"
          f" result {solved['result_id']}")
    groups = groups_of(solved)
    for index, members in enumerate(groups):
        print(f"  group {index}: {', '.join(members)}")

    # Two people cancel.  Without the reoptimize flag the service pins every
    # survivor to their current seat and only heals the gap.  Here ten people
    # cannot fill four groups of three, and hard pins are never quietly
    # dropped, so the request is refused outright.
    absent = [groups[0][0], groups[1][0]]
    refused = client.post(f"/rosters/{roster_id}/solve", json={
        "algo": "lns",
        "seed": 7,
        "restarts": 10,
        "params": {"capacity": {"lo": 3, "hi": 6}},
        "absent": absent,
    })
    body = refused.json()
    print(f"\n{absent[0]} and {absent[1]} are out; keeping all seats fails:")
    print(f"  {refused.status_code} {body['code']}: {body['message']}")

    # Letting groups shrink to pairs makes the pinned layout feasible again;
    # every survivor keeps their seat.
    kept = client.post(f"/rosters/{roster_id}/solve", json={
        "algo": "lns",
        "seed": 7,
        "restarts": 10,
        "params": {"capacity": {"lo": 2, "hi": 6}},
        "absent": absent,
    }).json()
    print("allowing pairs instead, everyone stays put:")
    for index, members in enumerate(groups_of(kept)):
        print(f"  group {index}: {', '.join(members)}")

    # Or hand the whole layout back to the optimizer.
    fresh = client.post(f"/rosters/{roster_id}/solve", json={
        "algo": "lns",
        "seed": 7,
        "restarts": 10,
        "params": {"capacity": {"lo": 3, "hi": 6}},
        "absent": absent,
        "reoptimize": True,
    }).json()
    print(f"re-optimized from scratch: success {fresh['evaluation']['success']:.4f},"
          f" {len(groups_of(fresh))} groups")

    # Score a hand grouping without storing anything.
    ids = [node["id"] for node in network_to_obj(net)["nodes"]]
    evaluated = client.post(f"/rosters/{roster_id}/evaluate", json={
        "partition": {"assignment": {node_id: i // 6 for i, node_id in enumerate(ids)}},
        "params": {"capacity": {"lo": 3, "hi": 6}},
    }).json()
    print(f"hand grouping: success {evaluated['success']:.4f},"
          f" deviancy warning {evaluated['deviancy_warning']}")

    # Solve history is kept on the roster document.
    roster = client.get(f"/rosters/{roster_id}").json()
    print(f"\nhistory: {len(roster['history'])} solves recorded,"
          f" latest {roster['history'][-1]['result_id']}")
