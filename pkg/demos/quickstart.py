"""Build a small roster by hand, find the best grouping, read the scores."""

from peerplan import (
    Arc, Behavior, CapacityBounds, ModelParams, Node, SocialNetwork,
    TieStrength, flip_profile, apply_intervention, solve_exact,
)

# Six people: two users (carol, dave) embedded in a friend circle.
# Arcs are directed; strength is strong or weak.
net = SocialNetwork(
    nodes=(
        Node("alice", Behavior.NON_USER),
        Node("bob", Behavior.NON_USER),
        Node("carol", Behavior.USER),
        Node("dave", Behavior.USER),
        Node("erin", Behavior.NON_USER),
        Node("frank", Behavior.NON_USER),
    ),
    arcs=(
        Arc("alice", "bob", TieStrength.STRONG),
        Arc("bob", "alice", TieStrength.STRONG),
        Arc("carol", "alice", TieStrength.STRONG),   # user pulling on a non-user
        Arc("carol", "dave", TieStrength.STRONG),
        Arc("dave", "carol", TieStrength.STRONG),
        Arc("erin", "frank", TieStrength.WEAK),
        Arc("frank", "erin", TieStrength.WEAK),
        Arc("dave", "erin", TieStrength.WEAK),
    ),
)

# Groups of 2 or 3; every other knob at its default.
params = ModelParams(capacity=CapacityBounds(2, 3))

result = solve_exact(net, params)

print("algorithm:", result.algorithm)
print("groups:")
for index, members in enumerate(result.partition.groups()):
    print(f"  {index}: {', '.join(members)}")
print(f"expected non-users after the intervention: {result.evaluation.expected_nonusers:.4f}")
print(f"success score: {result.evaluation.success:.4f}")

# Per-person flip risks under the chosen grouping.  become_user is the chance
# a non-user converts; become_nonuser the chance a user recovers.
weighted = apply_intervention(net, result.partition, params)
print("\nflip risks:")
for node_id, risk in sorted(flip_profile(weighted, params).items()):
    print(f"  {node_id:6s} become_user={risk.become_user:.3f} "
          f"become_nonuser={risk.become_nonuser:.3f}")

# The optimizer quarantines both users with bob: the group facilitator plus
# bob pull carol and dave toward recovery, and alice, erin and frank stay
# completely shielded.  Only bob takes on meaningful conversion risk.
