"""Shared instance builders for the test suite."""

from __future__ import annotations

import numpy as np

from peerplan import Arc, Behavior, Node, SocialNetwork, TieStrength


def random_network(rng: np.random.Generator, n: int, user_frac: float = 0.5,
                   arc_prob: float = 0.3, strong_frac: float = 0.5) -> SocialNetwork:
    """A seeded random directed network with at least one user and one non-user."""
    labels = np.zeros(n, dtype=bool)
    user_count = min(n - 1, max(1, round(user_frac * n)))
    labels[rng.choice(n, size=user_count, replace=False)] = True
    nodes = tuple(
        Node(f"m{i:02d}", Behavior.USER if labels[i] else Behavior.NON_USER)
        for i in range(n)
    )
    arcs = []
    for i in range(n):
        for j in range(n):
            if i != j and rng.random() < arc_prob:
                strength = TieStrength.STRONG if rng.random() < strong_frac else TieStrength.WEAK
                arcs.append(Arc(f"m{i:02d}", f"m{j:02d}", strength))
    return SocialNetwork(nodes=nodes, arcs=tuple(arcs))


def as_plain(net: SocialNetwork) -> tuple[list[tuple[str, str]], list[tuple[str, str, str]]]:
    """The (nodes, arcs) tuples the oracles operate on."""
    nodes = [(node.id, node.behavior.value) for node in net.nodes]
    arcs = [(arc.src, arc.dst, arc.strength.value) for arc in net.arcs]
    return nodes, arcs


def pair_network() -> SocialNetwork:
    """The 2-node worked example: one user, one non-user, no pre-ties."""
    return SocialNetwork(
        nodes=(Node("u", Behavior.USER), Node("v", Behavior.NON_USER)),
        arcs=(),
    )
