"""Generate a synthetic roster, push it through the file formats.

Covers the small-world generator, the JSON documents for networks, params
and results, the CSV import path, and the content hash that ties results
back to the network they were computed on.
"""

import csv
import tempfile
from pathlib import Path

from peerplan import (
    DecorationParams, LnsConfig, ModelParams, WsParams,
    decorate, generate_ws, network_hash, solve_lns,
)
from peerplan.fileio import (
    dump_json, network_from_obj, network_to_obj, params_from_obj,
    params_to_obj, read_network_csv, read_network_file, solve_result_from_obj,
    solve_result_to_obj, write_json,
)

work = Path(tempfile.mkdtemp())

# A ring lattice with degree 4, each edge rewired with probability 0.25,
# then labeled: 68% users, all ties reciprocated, half of them strong.
edges = generate_ws(WsParams(n=20, k=4, p=0.25, seed=1))
net = decorate(edges, DecorationParams(
    user_ratio=0.68, strong_ratio=0.5, reciprocity=1.0, seed=1))
print(f"generated {len(net.nodes)} nodes, {len(net.arcs)} arcs,"
      f" {net.user_count()} users")

# Network documents round-trip exactly; the hash tracks content, not layout.
write_json(work / "net.json", network_to_obj(net))
again = read_network_file(work / "net.json")
print("round-trip equal:", again == net)
print("hash:", network_hash(net)[:16], "==", network_hash(again)[:16])

# Params documents may be partial; absent keys keep their defaults.
params = params_from_obj({"flip_to_user": 0.9, "capacity": {"lo": 3, "hi": 5}})
print("params:", dump_json(params_to_obj(params)))

# Solve results serialize without wall-clock fields, so two runs with the
# same seed produce byte-identical documents.
result = solve_lns(net, params, LnsConfig(restarts=3, stall_limit=50, seed=9))
doc_a = dump_json(solve_result_to_obj(result))
result_b = solve_lns(net, params, LnsConfig(restarts=3, stall_limit=50, seed=9))
doc_b = dump_json(solve_result_to_obj(result_b))
print("seeded runs byte-identical:", doc_a == doc_b)
back = solve_result_from_obj(solve_result_to_obj(result))
print("parsed success:", f"{back.evaluation.success:.4f}")

# CSV import: one file of people, one of ties.
with open(work / "people.csv", "w", newline="") as fh:
    writer = csv.writer(fh)
    writer.writerow(["id", "behavior"])
    for node in net.nodes:
        writer.writerow([node.id, node.behavior.value])
with open(work / "ties.csv", "w", newline="") as fh:
    writer = csv.writer(fh)
    writer.writerow(["from", "to", "strength"])
    for arc in net.arcs:
        writer.writerow([arc.src, arc.dst, arc.strength.value])
from_csv = read_network_csv(work / "people.csv", work / "ties.csv")
print("csv import equal:", network_from_obj(network_to_obj(from_csv)) == net)
