"""Export the grouping problem as LP files for an external MILP solver.

One file per feasible group count.  The exported model never carries
facilitator terms, so its objective matches evaluate_partition with the
facilitator disabled.
"""

import tempfile
from pathlib import Path

from peerplan import (
    CapacityBounds, ModelParams, Partition,
    assignment_point, build_milp, evaluate_partition, export_instance,
    feasible_group_counts, objective_value, point_violations,
)
from peerplan.fileio import read_network_file

net = read_network_file(Path(__file__).parent / "data" / "club12.json")
params = ModelParams(capacity=CapacityBounds(3, 6), include_facilitator=False)

counts = sorted(feasible_group_counts(len(net.nodes), params.capacity))
print(f"{len(net.nodes)} nodes, capacity 3..6, feasible group counts: {counts}")

out = Path(tempfile.mkdtemp())
for path in export_instance(net, params, out, "club12"):
    print(f"wrote {path.name}  ({path.stat().st_size} bytes)")

# Peek at the file head: objective first, then the constraint rows.
text = (out / f"club12.{counts[0]}.lp").read_text().splitlines()
print("\nfirst lines of the smallest model:")
for line in text[:8]:
    print(f"  {line}")

# Any feasible hand-made assignment plugs into the model: its induced 0/1
# point satisfies every row and reproduces the evaluator's objective.
ids = net.node_ids()
partition = Partition({node_id: index // 4 for index, node_id in enumerate(ids)})
model = build_milp(net, params, s=3)
point = assignment_point(model, net, partition, params)
print(f"\nhand partition violations: {point_violations(model, point, tol=1e-9)}")
print(f"model objective:     {objective_value(model, point):.6f}")
print(f"evaluator objective: {evaluate_partition(net, partition, params).expected_nonusers:.6f}")
