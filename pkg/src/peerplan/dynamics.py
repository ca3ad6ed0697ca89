"""Deterministic tie rewiring after group assignment, plus per-target weight normalization.

The rewiring rule is a total function of (source behavior, target behavior,
pre-intervention tie, co-membership).  It is encoded as an explicit 24-entry
lookup so every cell can be pointed at and tested directly.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import (
    Behavior,
    InfeasiblePartition,
    ModelParams,
    Partition,
    SocialNetwork,
    TieStrength,
    validate_network,
    validate_partition,
)

FACILITATOR_PREFIX = "facilitator:"

# Post-intervention tie for (same_group, src_is_user, dst_is_user, pre).
# pre/post use None for "no tie".  Grouped by membership and behavior mix:
#   same group, same behavior: always strong (facilitated co-membership).
#   same group, mixed: strong survives, anything else becomes weak.
#   separate, same behavior: strong survives; weak survives only between
#     two non-users (user-user weak ties dissolve once users are split up).
#   separate, mixed: strong decays to weak, weak and absent ties dissolve.
_S, _W = TieStrength.STRONG, TieStrength.WEAK
TIE_TABLE: dict[tuple[bool, bool, bool, TieStrength | None], TieStrength | None] = {
    (True, True, True, _S): _S,
    (True, True, True, _W): _S,
    (True, True, True, None): _S,
    (True, False, False, _S): _S,
    (True, False, False, _W): _S,
    (True, False, False, None): _S,
    (True, True, False, _S): _S,
    (True, True, False, _W): _W,
    (True, True, False, None): _W,
    (True, False, True, _S): _S,
    (True, False, True, _W): _W,
    (True, False, True, None): _W,
    (False, True, True, _S): _S,
    (False, True, True, _W): None,
    (False, True, True, None): None,
    (False, False, False, _S): _S,
    (False, False, False, _W): _W,
    (False, False, False, None): None,
    (False, True, False, _S): _W,
    (False, True, False, _W): None,
    (False, True, False, None): None,
    (False, False, True, _S): _W,
    (False, False, True, _W): None,
    (False, False, True, None): None,
}


def tie_transition(
    src: Behavior,
    dst: Behavior,
    pre: TieStrength | None,
    same_group: bool,
) -> TieStrength | None:
    return TIE_TABLE[(same_group, src.is_user, dst.is_user, pre)]


def raw_weight(post: TieStrength | None, params: ModelParams) -> float:
    if post is TieStrength.STRONG:
        return params.weight_strong
    if post is TieStrength.WEAK:
        return params.weight_weak
    return 0.0


@dataclass(frozen=True)
class WeightedNode:
    id: str
    behavior: Behavior
    is_facilitator: bool = False


@dataclass
class WeightedNetwork:
    """Post-intervention influence graph with per-target normalized weights.

    weights holds only nonzero entries; a target absent from every key has an
    all-zero incoming row (its raw incoming sum was zero).
    """

    nodes: tuple[WeightedNode, ...]
    weights: dict[tuple[str, str], float]

    def original_nodes(self) -> list[WeightedNode]:
        return [node for node in self.nodes if not node.is_facilitator]

    def incoming(self, target: str) -> dict[str, float]:
        return {src: w for (src, dst), w in self.weights.items() if dst == target}


def facilitator_id(group_index: int) -> str:
    return f"{FACILITATOR_PREFIX}{group_index}"


def apply_intervention(
    net: SocialNetwork,
    partition: Partition,
    params: ModelParams,
) -> WeightedNetwork:
    """Rewire ties per the transition table, add facilitators, normalize per target.

    The facilitator is a fresh non-user per group with outgoing ties only:
    weak to users, strong to non-users in its group.  Raises
    InfeasiblePartition when the network or partition fails validation.
    """
    violations = validate_network(net) + validate_partition(net, partition, params.capacity)
    if violations:
        raise InfeasiblePartition(violations)

    behavior = net.behavior_of()
    pre = net.pre_ties()
    ids = sorted(behavior)

    # Same-group pairs are materialized densely; across groups only a
    # surviving pre-tie can yield a post-tie, so iterating the arc list
    # covers every nonzero case in O(sum of squared group sizes + |E|).
    raw: dict[tuple[str, str], float] = {}
    for group in partition.groups():
        for src in group:
            for dst in group:
                if src == dst:
                    continue
                post = tie_transition(behavior[src], behavior[dst], pre.get((src, dst)), True)
                value = raw_weight(post, params)
                if value > 0.0:
                    raw[(src, dst)] = value
    for (src, dst), strength in pre.items():
        if partition.same_group(src, dst):
            continue
        post = tie_transition(behavior[src], behavior[dst], strength, False)
        value = raw_weight(post, params)
        if value > 0.0:
            raw[(src, dst)] = value

    nodes = [WeightedNode(node_id, behavior[node_id]) for node_id in ids]
    if params.include_facilitator:
        for index, group in enumerate(partition.groups()):
            fac = facilitator_id(index)
            nodes.append(WeightedNode(fac, Behavior.NON_USER, is_facilitator=True))
            for member in group:
                strength = _W if behavior[member].is_user else _S
                raw[(fac, member)] = raw_weight(strength, params)

    incoming_sum: dict[str, float] = {node_id: 0.0 for node_id in ids}
    for (_, dst), value in raw.items():
        incoming_sum[dst] += value
    weights = {
        (src, dst): value / incoming_sum[dst]
        for (src, dst), value in raw.items()
    }
    return WeightedNetwork(nodes=tuple(nodes), weights=weights)
