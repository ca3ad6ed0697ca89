"""Core domain types: behavior-labeled directed networks, capacity bounds, partitions.

Everything downstream (rewiring, influence, solvers) consumes these types.
Validation returns violation records instead of raising so callers can report
all problems at once; raising is reserved for operations that cannot proceed.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field


class PeerplanError(Exception):
    """Base class for errors raised by this package."""


class InfeasiblePartition(PeerplanError):
    """A partition failed validation where a valid one is required."""

    def __init__(self, violations: list):
        self.violations = violations
        super().__init__("; ".join(str(v) for v in violations))


class Behavior(enum.Enum):
    USER = "user"
    NON_USER = "non_user"

    @property
    def is_user(self) -> bool:
        return self is Behavior.USER


class TieStrength(enum.Enum):
    STRONG = "strong"
    WEAK = "weak"


@dataclass(frozen=True)
class Node:
    id: str
    behavior: Behavior


@dataclass(frozen=True)
class Arc:
    """Directed tie src -> dst.  Strength is the pre-intervention label."""

    src: str
    dst: str
    strength: TieStrength


@dataclass(frozen=True)
class CapacityBounds:
    lo: int
    hi: int

    def __post_init__(self):
        if not (1 <= self.lo <= self.hi):
            raise ValueError(f"capacity bounds must satisfy 1 <= lo <= hi, got ({self.lo}, {self.hi})")


@dataclass(frozen=True)
class ModelParams:
    """Intervention and influence parameters.

    flip_to_user: probability a non-user whose threshold is exceeded becomes a user.
    flip_to_nonuser: probability a user whose threshold is exceeded becomes a non-user.
    Raw tie weights feed per-target normalization, so only their ratio matters.
    """

    flip_to_user: float = 1.0
    flip_to_nonuser: float = 0.8
    weight_strong: float = 3.0
    weight_weak: float = 1.0
    capacity: CapacityBounds = field(default_factory=lambda: CapacityBounds(3, 8))
    include_facilitator: bool = True

    def __post_init__(self):
        if not (0.0 <= self.flip_to_user <= 1.0 and 0.0 <= self.flip_to_nonuser <= 1.0):
            raise ValueError("flip probabilities must lie in [0, 1]")
        if not (0.0 <= self.weight_weak < self.weight_strong):
            raise ValueError("raw weights must satisfy 0 <= weak < strong")


@dataclass
class SocialNetwork:
    """Immutable-by-convention pre-intervention network."""

    nodes: tuple[Node, ...]
    arcs: tuple[Arc, ...]

    def __post_init__(self):
        self.nodes = tuple(self.nodes)
        self.arcs = tuple(self.arcs)

    def node_ids(self) -> list[str]:
        return [node.id for node in self.nodes]

    def behavior_of(self) -> dict[str, Behavior]:
        return {node.id: node.behavior for node in self.nodes}

    def pre_ties(self) -> dict[tuple[str, str], TieStrength]:
        return {(arc.src, arc.dst): arc.strength for arc in self.arcs}

    def user_count(self) -> int:
        return sum(1 for node in self.nodes if node.behavior.is_user)

    def nonuser_count(self) -> int:
        return len(self.nodes) - self.user_count()


@dataclass
class Partition:
    """Assignment of every node id to a group index in [0, group_count)."""

    assignment: dict[str, int]

    def group_count(self) -> int:
        return max(self.assignment.values()) + 1 if self.assignment else 0

    def groups(self) -> list[list[str]]:
        """Members per group index, each group sorted by id."""
        out: list[list[str]] = [[] for _ in range(self.group_count())]
        for node_id in sorted(self.assignment):
            index = self.assignment[node_id]
            if index < 0:
                raise ValueError(f"negative group index {index} for node {node_id!r}")
            out[index].append(node_id)
        return out

    def same_group(self, a: str, b: str) -> bool:
        return self.assignment[a] == self.assignment[b]

    def canonical_form(self) -> tuple[tuple[str, ...], ...]:
        """Groups as sorted tuples, ordered by smallest member: identity up to relabeling."""
        groups = [tuple(g) for g in self.groups() if g]
        return tuple(sorted(groups, key=lambda g: g[0]))

    def relabeled_canonically(self) -> "Partition":
        """Same grouping with indices reassigned in canonical group order."""
        assignment = {}
        for index, group in enumerate(self.canonical_form()):
            for node_id in group:
                assignment[node_id] = index
        return Partition(assignment)


# ---------------------------------------------------------------------------
# Violations.  One frozen dataclass per kind so tests can match exactly.


@dataclass(frozen=True)
class SelfArc:
    node: str


@dataclass(frozen=True)
class DuplicateArc:
    src: str
    dst: str


@dataclass(frozen=True)
class DanglingEndpoint:
    src: str
    dst: str
    missing: str


@dataclass(frozen=True)
class DuplicateNode:
    node: str


@dataclass(frozen=True)
class NodeUnassigned:
    node: str


@dataclass(frozen=True)
class BadGroupIndex:
    node: str
    index: int


@dataclass(frozen=True)
class UnknownNode:
    node: str


@dataclass(frozen=True)
class EmptyGroup:
    index: int


@dataclass(frozen=True)
class GroupTooSmall:
    index: int
    size: int
    lo: int


@dataclass(frozen=True)
class GroupTooLarge:
    index: int
    size: int
    hi: int


def validate_network(net: SocialNetwork) -> list:
    """Every structural violation in deterministic order; empty iff well-formed."""
    violations: list = []
    seen_nodes: set[str] = set()
    for node in net.nodes:
        if node.id in seen_nodes:
            violations.append(DuplicateNode(node.id))
        seen_nodes.add(node.id)
    seen_arcs: set[tuple[str, str]] = set()
    for arc in net.arcs:
        if arc.src == arc.dst:
            violations.append(SelfArc(arc.src))
        if (arc.src, arc.dst) in seen_arcs:
            violations.append(DuplicateArc(arc.src, arc.dst))
        seen_arcs.add((arc.src, arc.dst))
        for endpoint in (arc.src, arc.dst):
            if endpoint not in seen_nodes:
                violations.append(DanglingEndpoint(arc.src, arc.dst, endpoint))
    return violations


def feasible_group_counts(n: int, bounds: CapacityBounds) -> set[int]:
    """All S >= 1 admitting group sizes within bounds: S*lo <= n <= S*hi."""
    return {s for s in range(1, n + 1) if s * bounds.lo <= n <= s * bounds.hi}


def validate_partition(net: SocialNetwork, partition: Partition, bounds: CapacityBounds) -> list:
    """Missing/extra nodes, bad indices, empty group indices, per-group sizes."""
    violations: list = []
    ids = set(net.node_ids())
    for node_id in sorted(ids - set(partition.assignment)):
        violations.append(NodeUnassigned(node_id))
    for node_id in sorted(set(partition.assignment) - ids):
        violations.append(UnknownNode(node_id))
    bad_index = {node_id for node_id, g in partition.assignment.items() if g < 0}
    for node_id in sorted(bad_index):
        violations.append(BadGroupIndex(node_id, partition.assignment[node_id]))
    if bad_index:
        return violations
    for index, group in enumerate(partition.groups()):
        size = len(group)
        if size == 0:
            violations.append(EmptyGroup(index))
        elif size < bounds.lo:
            violations.append(GroupTooSmall(index, size, bounds.lo))
        elif size > bounds.hi:
            violations.append(GroupTooLarge(index, size, bounds.hi))
    return violations
