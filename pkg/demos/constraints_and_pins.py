"""Steer the solver with pins, link constraints and frozen groups.

All constraints are hard: the solver optimizes over the assignments that
satisfy every one of them, and reports UnsatisfiableConstraints when the
set admits no feasible assignment at all.
"""

from peerplan import (
    CapacityBounds, DecorationParams, ModelParams, SolveConstraints,
    UnsatisfiableConstraints, WsParams, decorate, generate_ws, solve_exact,
)

edges = generate_ws(WsParams(n=12, k=4, p=0.25, seed=3))
net = decorate(edges, DecorationParams(user_ratio=0.5, seed=3))
params = ModelParams(capacity=CapacityBounds(3, 6))
ids = net.node_ids()

free = solve_exact(net, params)
print(f"unconstrained optimum: success {free.evaluation.success:.4f}")

# must_link pairs share a group; cannot_link pairs never do.
linked = SolveConstraints(
    must_link={frozenset((ids[0], ids[1]))},
    cannot_link={frozenset((ids[2], ids[3]))},
)
got = solve_exact(net, params, linked)
assignment = got.partition.assignment
print(f"with link constraints:  success {got.evaluation.success:.4f}")
print(f"  {ids[0]} and {ids[1]} share group {assignment[ids[0]]};"
      f" {ids[2]} is in {assignment[ids[2]]}, {ids[3]} in {assignment[ids[3]]}")

# Pins fix a node to a group index.  Pinning a whole group and freezing it
# makes that group untouchable; everyone else is re-seated around it.
frozen = SolveConstraints(
    pinned={ids[0]: 0, ids[1]: 0, ids[2]: 0},
    frozen_groups={0},
)
got = solve_exact(net, params, frozen)
print(f"with a frozen group 0: success {got.evaluation.success:.4f}")
print(f"  group 0 is exactly {sorted(m for m, g in got.partition.assignment.items() if g == 0)}")

# Contradictory constraints are reported, not silently dropped.
try:
    solve_exact(net, params, SolveConstraints(
        must_link={frozenset((ids[0], ids[1]))},
        cannot_link={frozenset((ids[0], ids[1]))},
    ))
except UnsatisfiableConstraints as err:
    print(f"contradiction rejected: {err}")

# A success score below zero means the requested layout is expected to
# create users on net.  Forcing all six users into one group does it here.
users = [node.id for node in net.nodes if node.behavior.is_user]
packed = SolveConstraints(must_link={frozenset(pair) for pair in zip(users, users[1:])})
got = solve_exact(net, params, packed)
print(f"all users forced together: success {got.evaluation.success:.4f}"
      + ("  (deviancy risk)" if got.evaluation.success < 0 else ""))
