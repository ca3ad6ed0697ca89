"""Run every solver and baseline on one instance and compare scores."""

from peerplan import (
    DecorationParams, LnsConfig, ModelParams, WsParams,
    baseline_even_users, baseline_network, baseline_random, decorate,
    evaluate_partition, generate_ws, solve_lns, solve_local_search,
)

SEED = 11

edges = generate_ws(WsParams(n=30, k=4, p=0.25, seed=SEED))
net = decorate(edges, DecorationParams(user_ratio=0.68, seed=SEED))
params = ModelParams()

config = LnsConfig(restarts=10, stall_limit=200, seed=SEED)
lns = solve_lns(net, params, config)
local = solve_local_search(net, params, config)

rows = [
    ("lns", lns.evaluation, lns.wall_time),
    ("local search", local.evaluation, local.wall_time),
]
for name, fn in (("random", baseline_random),
                 ("network greedy", baseline_network),
                 ("even users", baseline_even_users)):
    partition = fn(net, params, seed=SEED)
    rows.append((name, evaluate_partition(net, partition, params), 0.0))

print(f"{'strategy':<16} {'expected non-users':>18} {'success':>9} {'seconds':>8}")
for name, evaluation, seconds in rows:
    print(f"{name:<16} {evaluation.expected_nonusers:>18.4f} "
          f"{evaluation.success:>9.4f} {seconds:>8.2f}")

# The trace records one entry per strict improvement, tagged with the restart
# that found it; here just its final value per restart.  Each restart opens at
# a different feasible group count, so the climbs start from different floors.
print("\nbest objective reached per lns restart:")
best = {}
for entry in lns.improvement_trace:
    best[entry.restart] = entry
for restart in sorted(best):
    entry = best[restart]
    print(f"  restart {restart}  t={entry.elapsed:.3f}s  objective {entry.objective:.4f}")
