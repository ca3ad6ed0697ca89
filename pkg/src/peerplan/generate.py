"""Synthetic instances: Watts-Strogatz skeletons decorated with behaviors and strengths."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import Arc, Behavior, Node, PeerplanError, SocialNetwork, TieStrength


class BadDegree(PeerplanError):
    """Ring degree must be even and satisfy 2 <= k < n."""


@dataclass(frozen=True)
class WsParams:
    n: int
    k: int = 4
    p: float = 0.25
    seed: int = 0

    def __post_init__(self):
        if not (0.0 <= self.p <= 1.0):
            raise ValueError(f"rewiring probability must lie in [0, 1], got {self.p}")


@dataclass(frozen=True)
class DecorationParams:
    user_ratio: float = 0.68
    strong_ratio: float = 0.5
    reciprocity: float = 1.0
    seed: int = 0

    def __post_init__(self):
        for name in ("user_ratio", "strong_ratio", "reciprocity"):
            value = getattr(self, name)
            if not (0.0 <= value <= 1.0):
                raise ValueError(f"{name} must lie in [0, 1], got {value}")


def generate_ws(wp: WsParams) -> list[tuple[int, int]]:
    """Watts-Strogatz small-world edge set over nodes 0..n-1.

    Ring lattice joining each node to its k nearest neighbors, then each
    edge's far endpoint is rewired with probability p to a uniform target that
    is neither the near endpoint nor a current neighbor.  Returns exactly
    n*k/2 edges as sorted (low, high) tuples.
    """
    n, k, p = wp.n, wp.k, wp.p
    if k % 2 != 0 or not (2 <= k < n):
        raise BadDegree(f"need even k with 2 <= k < n, got k={k}, n={n}")
    rng = np.random.default_rng(wp.seed)
    neighbors: list[set[int]] = [set() for _ in range(n)]
    for lap in range(1, k // 2 + 1):
        for i in range(n):
            j = (i + lap) % n
            neighbors[i].add(j)
            neighbors[j].add(i)
    for lap in range(1, k // 2 + 1):
        for i in range(n):
            j = (i + lap) % n
            if rng.random() >= p:
                continue
            if len(neighbors[i]) >= n - 1:
                continue
            # The (i, j) edge may already have been rewired away by an
            # earlier lap's move; nothing to detach then.
            if j not in neighbors[i]:
                continue
            while True:
                target = int(rng.integers(n))
                if target != i and target not in neighbors[i]:
                    break
            neighbors[i].discard(j)
            neighbors[j].discard(i)
            neighbors[i].add(target)
            neighbors[target].add(i)
    edges = sorted(
        (i, j) for i in range(n) for j in neighbors[i] if i < j
    )
    assert len(edges) == n * k // 2
    return edges


def node_name(index: int, n: int) -> str:
    """Zero-padded id so lexicographic and numeric order agree."""
    width = len(str(n - 1))
    return f"p{index:0{width}d}"


def decorate(edges: list[tuple[int, int]], dp: DecorationParams) -> SocialNetwork:
    """Lift an undirected edge set to a behavior-labeled directed SocialNetwork.

    Exactly round(user_ratio * n) nodes become users (seeded uniform choice,
    never per-node coin flips, so benchmark strata are sharp).  Each edge
    emits one arc in a random direction, plus the reverse arc with probability
    reciprocity; every arc is independently strong with probability
    strong_ratio.
    """
    n = max((max(a, b) for a, b in edges), default=-1) + 1
    rng = np.random.default_rng(dp.seed)
    user_count = round(dp.user_ratio * n)
    users = set(rng.choice(n, size=user_count, replace=False).tolist()) if user_count else set()
    nodes = tuple(
        Node(node_name(i, n), Behavior.USER if i in users else Behavior.NON_USER)
        for i in range(n)
    )

    def strength() -> TieStrength:
        return TieStrength.STRONG if rng.random() < dp.strong_ratio else TieStrength.WEAK

    arcs: list[Arc] = []
    for a, b in sorted(edges):
        src, dst = (a, b) if rng.random() < 0.5 else (b, a)
        arcs.append(Arc(node_name(src, n), node_name(dst, n), strength()))
        if rng.random() < dp.reciprocity:
            arcs.append(Arc(node_name(dst, n), node_name(src, n), strength()))
    return SocialNetwork(nodes=nodes, arcs=tuple(arcs))
