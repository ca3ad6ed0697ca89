"""Group-assignment solvers: exact enumeration, LNS, local search, and baselines.

All solvers maximize the expected post-intervention non-user count.  Candidate
ranking inside the search loops uses a vectorized evaluator built from the same
tie-transition table as the canonical path; every reported evaluation is
recomputed through apply_intervention + expected_nonusers so results never
depend on the fast path being right (tests pin the two paths together anyway).

Group indices are plain labels.  They only carry meaning when constraints
reference them (pinned, frozen_groups), so solver outputs are relabeled to
canonical order exactly when no constraint does.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field

import numpy as np

from .model import (
    CapacityBounds,
    ModelParams,
    Partition,
    PeerplanError,
    SocialNetwork,
    TieStrength,
    feasible_group_counts,
    validate_network,
)
from .dynamics import apply_intervention, raw_weight, tie_transition
from .influence import Evaluation, expected_nonusers, flip_profile, success


class InstanceTooLarge(PeerplanError):
    """solve_exact refused an instance above its node limit."""


class InfeasibleBounds(PeerplanError):
    """No group count S satisfies S*lo <= n <= S*hi."""


class UnsatisfiableConstraints(PeerplanError):
    """SolveConstraints admit no feasible partition."""


class NoFeasibleSplit(PeerplanError):
    """Two-group repair found no split satisfying bounds and constraints."""


class TimeBudgetZero(PeerplanError):
    """A solver was given a non-positive time limit."""


@dataclass
class SolveConstraints:
    """Hard constraints on solver output.

    pinned maps node id -> group index.  must_link / cannot_link hold
    unordered id pairs.  A group index in frozen_groups is immutable and its
    membership is exactly the nodes pinned to it.
    """

    pinned: dict[str, int] = field(default_factory=dict)
    must_link: set[frozenset[str]] = field(default_factory=set)
    cannot_link: set[frozenset[str]] = field(default_factory=set)
    frozen_groups: set[int] = field(default_factory=set)

    def references_group_indices(self) -> bool:
        return bool(self.pinned) or bool(self.frozen_groups)

    def is_empty(self) -> bool:
        return not (self.pinned or self.must_link or self.cannot_link or self.frozen_groups)


@dataclass
class LnsConfig:
    restarts: int = 50
    stall_limit: int = 200
    destroy_size: int = 2
    time_limit: float | None = None
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1 or self.stall_limit < 1 or self.destroy_size < 2:
            raise ValueError("restarts and stall_limit must be >= 1, destroy_size >= 2")


@dataclass(frozen=True)
class TraceEntry:
    restart: int
    elapsed: float
    objective: float


@dataclass
class SolveResult:
    partition: Partition
    evaluation: Evaluation
    algorithm: str
    wall_time: float
    restarts_completed: int
    improvement_trace: list[TraceEntry]


def evaluate_partition(net: SocialNetwork, partition: Partition, params: ModelParams) -> Evaluation:
    """Canonical objective: rewire, normalize, take the closed-form expectation.

    The single evaluation path behind every solver and baseline result.
    """
    wnet = apply_intervention(net, partition, params)
    expected = expected_nonusers(wnet, params)
    return Evaluation(
        expected_nonusers=expected,
        success=success(net, expected, params),
        flips=flip_profile(wnet, params),
        partition_echo=partition,
    )


# ---------------------------------------------------------------------------
# Vectorized evaluation core.


class _InstanceArrays:
    """Dense per-instance data for batch objective evaluation.

    rs/rp hold the raw post-tie weight of every ordered pair under same-group
    and separate-group membership; they are filled by calling tie_transition
    per pair so the fast path cannot drift from the table.
    """

    def __init__(self, net: SocialNetwork, params: ModelParams):
        behavior = net.behavior_of()
        self.ids: list[str] = sorted(behavior)
        self.index = {node_id: i for i, node_id in enumerate(self.ids)}
        self.n = len(self.ids)
        self.params = params
        self.is_user = np.array([behavior[i].is_user for i in self.ids])
        self.user_count = int(np.count_nonzero(self.is_user))
        self.nonuser_count = self.n - self.user_count

        pre = net.pre_ties()
        self.rs = np.zeros((self.n, self.n))
        self.rp = np.zeros((self.n, self.n))
        for a, src in enumerate(self.ids):
            for b, dst in enumerate(self.ids):
                if a == b:
                    continue
                tie = pre.get((src, dst))
                self.rs[a, b] = raw_weight(tie_transition(behavior[src], behavior[dst], tie, True), params)
                self.rp[a, b] = raw_weight(tie_transition(behavior[src], behavior[dst], tie, False), params)
        if params.include_facilitator:
            self.fac_raw = np.where(self.is_user, params.weight_weak, params.weight_strong)
        else:
            self.fac_raw = np.zeros(self.n)

    def objective_batch(self, assignments: np.ndarray) -> np.ndarray:
        """Expected non-user count for each assignment row (C, n) of group indices."""
        same = assignments[:, :, None] == assignments[:, None, :]
        raw = np.where(same, self.rs[None, :, :], self.rp[None, :, :])
        den = raw.sum(axis=1) + self.fac_raw[None, :]
        user_in = (raw * self.is_user[None, :, None]).sum(axis=1)
        with np.errstate(invalid="ignore", divide="ignore"):
            ratio = np.where(den > 0.0, user_in / np.where(den > 0.0, den, 1.0), 0.0)
        covered = den > 0.0
        nonuser_part = np.where(~self.is_user[None, :], 1.0 - self.params.flip_to_user * ratio, 0.0)
        user_part = np.where(self.is_user[None, :] & covered, self.params.flip_to_nonuser * (1.0 - ratio), 0.0)
        return (nonuser_part + user_part).sum(axis=1)

    def objective_single(self, assignment: np.ndarray) -> float:
        return float(self.objective_batch(assignment[None, :])[0])

    def to_vector(self, partition: Partition) -> np.ndarray:
        return np.array([partition.assignment[i] for i in self.ids], dtype=np.int64)

    def to_partition(self, vector: np.ndarray) -> Partition:
        return Partition({node_id: int(vector[i]) for i, node_id in enumerate(self.ids)})


def _finalize_partition(partition: Partition, constraints: SolveConstraints) -> Partition:
    if constraints.references_group_indices():
        return partition
    return partition.relabeled_canonically()


# ---------------------------------------------------------------------------
# Constraint handling.


def _must_link_atoms(ids: list[str], constraints: SolveConstraints) -> list[list[str]]:
    """Connected components of the must-link graph, singletons included, sorted."""
    parent = {node_id: node_id for node_id in ids}

    def find(x: str) -> str:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    known = set(ids)
    for pair in constraints.must_link:
        a, b = sorted(pair)
        if a in known and b in known:
            parent[find(a)] = find(b)
    groups: dict[str, list[str]] = {}
    for node_id in ids:
        groups.setdefault(find(node_id), []).append(node_id)
    return sorted((sorted(g) for g in groups.values()), key=lambda g: g[0])


def check_constraints(net: SocialNetwork, constraints: SolveConstraints, bounds: CapacityBounds) -> None:
    """Raise UnsatisfiableConstraints on any structurally impossible input.

    Checks are necessary conditions only; solvers may still discover
    unsatisfiability during search (and raise then).
    """
    ids = set(net.node_ids())
    n = len(ids)
    feasible = feasible_group_counts(n, bounds)
    if not feasible:
        raise InfeasibleBounds(f"no group count fits {n} nodes within ({bounds.lo}, {bounds.hi})")
    for node_id, group in constraints.pinned.items():
        if node_id not in ids:
            raise UnsatisfiableConstraints(f"pinned node {node_id!r} not in network")
        if group < 0:
            raise UnsatisfiableConstraints(f"pinned group index {group} is negative")
    for pair in constraints.must_link | constraints.cannot_link:
        if len(pair) != 2:
            raise UnsatisfiableConstraints(f"link constraint {set(pair)!r} must name two distinct nodes")
        for node_id in pair:
            if node_id not in ids:
                raise UnsatisfiableConstraints(f"linked node {node_id!r} not in network")
    if constraints.must_link & constraints.cannot_link:
        overlap = constraints.must_link & constraints.cannot_link
        raise UnsatisfiableConstraints(f"pairs both must-link and cannot-link: {sorted(map(sorted, overlap))}")
    for group in constraints.frozen_groups:
        if group < 0:
            raise UnsatisfiableConstraints(f"frozen group index {group} is negative")
        members = [i for i, g in constraints.pinned.items() if g == group]
        if not (bounds.lo <= len(members) <= bounds.hi):
            raise UnsatisfiableConstraints(
                f"frozen group {group} has {len(members)} pinned members, outside ({bounds.lo}, {bounds.hi})"
            )
    atoms = _must_link_atoms(sorted(ids), constraints)
    atom_of = {node_id: k for k, atom in enumerate(atoms) for node_id in atom}
    for atom in atoms:
        if len(atom) > bounds.hi:
            raise UnsatisfiableConstraints(f"must-link component {atom} exceeds group capacity {bounds.hi}")
        pins = {constraints.pinned[i] for i in atom if i in constraints.pinned}
        if len(pins) > 1:
            raise UnsatisfiableConstraints(f"must-link component {atom} pinned to multiple groups {sorted(pins)}")
    for pair in constraints.cannot_link:
        a, b = sorted(pair)
        if atom_of[a] == atom_of[b]:
            raise UnsatisfiableConstraints(f"cannot-link pair ({a}, {b}) joined by must-link")
    min_groups = max((g for g in constraints.pinned.values()), default=-1) + 1
    if min_groups > 0 and not any(s >= min_groups for s in feasible):
        raise UnsatisfiableConstraints(
            f"pins require at least {min_groups} groups but feasible counts are {sorted(feasible)}"
        )


def _satisfies(vector: np.ndarray, arrays: _InstanceArrays, constraints: SolveConstraints) -> bool:
    for node_id, group in constraints.pinned.items():
        if vector[arrays.index[node_id]] != group:
            return False
    for pair in constraints.must_link:
        a, b = sorted(pair)
        if vector[arrays.index[a]] != vector[arrays.index[b]]:
            return False
    for pair in constraints.cannot_link:
        a, b = sorted(pair)
        if vector[arrays.index[a]] == vector[arrays.index[b]]:
            return False
    for group in constraints.frozen_groups:
        members = {i for i, g in enumerate(vector) if g == group}
        expected = {arrays.index[i] for i, g in constraints.pinned.items() if g == group}
        if members != expected:
            return False
    return True


# ---------------------------------------------------------------------------
# Exact solver.


def _size_reachable(n: int, bounds: CapacityBounds) -> list[bool]:
    """reachable[r] iff r can be written as a sum of block sizes in bounds."""
    reachable = [False] * (n + 1)
    reachable[0] = True
    for r in range(1, n + 1):
        reachable[r] = any(
            reachable[r - k] for k in range(bounds.lo, min(bounds.hi, r) + 1)
        )
    return reachable


def _enumerate_partitions(n: int, bounds: CapacityBounds):
    """All set partitions of range(n) with every block size in bounds.

    Anchored: each new block takes the smallest unassigned element, so blocks
    appear ordered by smallest member and each partition is produced once.
    Yields assignment vectors (np.ndarray of group indices).
    """
    reachable = _size_reachable(n, bounds)
    assignment = np.full(n, -1, dtype=np.int64)

    def blocks(unassigned: list[int], next_group: int):
        if not unassigned:
            yield assignment.copy()
            return
        anchor, rest = unassigned[0], unassigned[1:]
        assignment[anchor] = next_group
        for size in range(bounds.lo, min(bounds.hi, len(unassigned)) + 1):
            if not reachable[len(unassigned) - size]:
                continue
            for combo in itertools.combinations(rest, size - 1):
                chosen = set(combo)
                for member in combo:
                    assignment[member] = next_group
                yield from blocks([x for x in rest if x not in chosen], next_group + 1)
                for member in combo:
                    assignment[member] = -1
        assignment[anchor] = -1

    yield from blocks(list(range(n)), 0)


def solve_exact(
    net: SocialNetwork,
    params: ModelParams,
    constraints: SolveConstraints | None = None,
    exact_limit: int = 12,
    batch_size: int = 4096,
) -> SolveResult:
    """Exhaustive search over feasible partitions; optimal and deterministic.

    Group indices in the output are canonical (groups ordered by smallest
    member), which is also how pinned indices are interpreted here.  Ties are
    broken toward fewer groups, then the lexicographically smallest canonical
    form.  Refuses instances above exact_limit.
    """
    start = time.perf_counter()
    constraints = constraints or SolveConstraints()
    _check_network(net)
    n = len(net.nodes)
    if n > exact_limit:
        raise InstanceTooLarge(f"{n} nodes exceeds exact enumeration limit {exact_limit}")
    check_constraints(net, constraints, params.capacity)
    arrays = _InstanceArrays(net, params)

    best_obj: float | None = None
    best_key = None
    best_vector: np.ndarray | None = None

    def consider(chunk: list[np.ndarray]):
        nonlocal best_obj, best_key, best_vector
        stacked = np.stack(chunk)
        objectives = arrays.objective_batch(stacked)
        threshold = -np.inf if best_obj is None else best_obj
        for row in np.nonzero(objectives >= threshold)[0]:
            obj = float(objectives[row])
            vector = stacked[row]
            key = (int(vector.max()) + 1, _canonical_key(arrays, vector))
            if best_obj is None or obj > best_obj or (obj == best_obj and key < best_key):
                best_obj, best_key, best_vector = obj, key, vector.copy()

    chunk: list[np.ndarray] = []
    for vector in _enumerate_partitions(n, params.capacity):
        if not _satisfies(vector, arrays, constraints):
            continue
        chunk.append(vector)
        if len(chunk) >= batch_size:
            consider(chunk)
            chunk = []
    if chunk:
        consider(chunk)
    if best_vector is None:
        raise UnsatisfiableConstraints("no feasible partition satisfies the constraints")

    partition = arrays.to_partition(best_vector)
    return SolveResult(
        partition=partition,
        evaluation=evaluate_partition(net, partition, params),
        algorithm="exact",
        wall_time=time.perf_counter() - start,
        restarts_completed=1,
        improvement_trace=[TraceEntry(0, time.perf_counter() - start, best_obj)],
    )


def _canonical_key(arrays: _InstanceArrays, vector: np.ndarray):
    """Tie-break key: group count then canonical nested-tuple form."""
    groups: dict[int, list[str]] = {}
    for i, node_id in enumerate(arrays.ids):
        groups.setdefault(int(vector[i]), []).append(node_id)
    form = tuple(sorted((tuple(sorted(g)) for g in groups.values()), key=lambda g: g[0]))
    return form


def _check_network(net: SocialNetwork) -> None:
    violations = validate_network(net)
    if violations:
        from .model import InfeasiblePartition

        raise InfeasiblePartition(violations)


# ---------------------------------------------------------------------------
# Two-group exact repair.


_COMBO_CACHE: dict[tuple[int, int], np.ndarray] = {}


def _combinations_array(pool: int, take: int) -> np.ndarray:
    key = (pool, take)
    if key not in _COMBO_CACHE:
        combos = list(itertools.combinations(range(pool), take))
        _COMBO_CACHE[key] = np.array(combos, dtype=np.int64).reshape(len(combos), take)
    return _COMBO_CACHE[key]


class _RepairEngine:
    """Exact repair of two groups with union-restricted delta evaluation.

    Only ties among union members depend on the split: outside sources stay
    separate-group and the facilitator row is membership-independent, so each
    candidate's objective differs from any other only through union targets.
    """

    def __init__(self, arrays: _InstanceArrays, constraints: SolveConstraints):
        self.arrays = arrays
        self.constraints = constraints
        self.rp_col_all = arrays.rp.sum(axis=0)
        self.rp_col_user = (arrays.rp * arrays.is_user[:, None]).sum(axis=0)

    def best_split(
        self, vector: np.ndarray, group_a: int, group_b: int
    ) -> tuple[np.ndarray, float, float]:
        """Best reassignment of the two groups' union.

        Returns (new assignment vector, best union contribution, incumbent
        union contribution); raises NoFeasibleSplit when no candidate exists.
        """
        arrays, bounds = self.arrays, self.arrays.params.capacity
        union = np.nonzero((vector == group_a) | (vector == group_b))[0]
        m = union.size
        candidates = self._candidate_matrix(union, vector, group_a, group_b)
        if candidates.shape[0] == 0:
            raise NoFeasibleSplit(
                f"no split of {m} nodes into sizes within ({bounds.lo}, {bounds.hi}) satisfies the constraints"
            )

        rs_uu = arrays.rs[np.ix_(union, union)]
        rp_uu = arrays.rp[np.ix_(union, union)]
        d_all = rs_uu - rp_uu
        d_user = d_all * arrays.is_user[union][:, None]
        # Every source contributes at least its separate-group weight, so the
        # fixed part of a union target's incoming sum is the full rp column
        # (plus the facilitator); candidates only add same-group deltas d.
        base_all = self.rp_col_all[union] + arrays.fac_raw[union]
        base_user = self.rp_col_user[union]
        xd_all_cols = d_all.sum(axis=0)
        xd_user_cols = d_user.sum(axis=0)

        x = candidates.astype(np.float64)
        xd = x @ d_all
        xdu = x @ d_user
        in_all = base_all[None, :] + x * xd + (1.0 - x) * (xd_all_cols[None, :] - xd)
        in_user = base_user[None, :] + x * xdu + (1.0 - x) * (xd_user_cols[None, :] - xdu)
        covered = in_all > 0.0
        with np.errstate(invalid="ignore", divide="ignore"):
            ratio = np.where(covered, in_user / np.where(covered, in_all, 1.0), 0.0)
        u = arrays.is_user[union]
        contrib = np.where(
            ~u[None, :],
            1.0 - arrays.params.flip_to_user * ratio,
            np.where(covered, arrays.params.flip_to_nonuser * (1.0 - ratio), 0.0),
        )
        varying = contrib.sum(axis=1)

        incumbent_x = (vector[union] == group_a).astype(np.float64)
        incumbent_varying = float(self._varying_of(incumbent_x, d_all, d_user, base_all, base_user, u))

        winner = int(np.argmax(varying))
        new_vector = vector.copy()
        side = candidates[winner]
        new_vector[union] = np.where(side, group_a, group_b)
        return new_vector, float(varying[winner]), incumbent_varying

    def _varying_of(self, x_row, d_all, d_user, base_all, base_user, u) -> float:
        arrays = self.arrays
        xd = x_row @ d_all
        xdu = x_row @ d_user
        in_all = base_all + x_row * xd + (1.0 - x_row) * (d_all.sum(axis=0) - xd)
        in_user = base_user + x_row * xdu + (1.0 - x_row) * (d_user.sum(axis=0) - xdu)
        covered = in_all > 0.0
        with np.errstate(invalid="ignore", divide="ignore"):
            ratio = np.where(covered, in_user / np.where(covered, in_all, 1.0), 0.0)
        contrib = np.where(
            ~u,
            1.0 - arrays.params.flip_to_user * ratio,
            np.where(covered, arrays.params.flip_to_nonuser * (1.0 - ratio), 0.0),
        )
        return contrib.sum()

    def _candidate_matrix(
        self, union: np.ndarray, vector: np.ndarray, group_a: int, group_b: int
    ) -> np.ndarray:
        """Binary matrix (C, m): 1 assigns the union member to group_a."""
        arrays, constraints = self.arrays, self.constraints
        bounds = arrays.params.capacity
        m = union.size
        union_ids = [arrays.ids[i] for i in union]
        pos = {node_id: k for k, node_id in enumerate(union_ids)}

        forced: dict[int, int] = {}
        for node_id, group in constraints.pinned.items():
            if node_id in pos:
                if group == group_a:
                    forced[pos[node_id]] = 1
                elif group == group_b:
                    forced[pos[node_id]] = 0
                # pins to other groups mean the incumbent already violates
                # the constraints; the caller guards against that.

        atoms = _must_link_atoms(union_ids, constraints)
        atom_positions = [[pos[i] for i in atom] for atom in atoms]
        atom_force: list[int | None] = []
        for positions in atom_positions:
            sides = {forced[p] for p in positions if p in forced}
            if len(sides) > 1:
                return np.zeros((0, m), dtype=np.int8)
            atom_force.append(sides.pop() if sides else None)

        labeled = any(side is not None for side in atom_force)
        k_lo = max(bounds.lo, m - bounds.hi)
        k_hi = min(bounds.hi, m - bounds.lo)

        singleton = all(len(p) == 1 for p in atom_positions)
        rows: list[np.ndarray]
        if singleton and not labeled:
            # Unlabeled blocks: anchor the first member to group_a to skip mirrors.
            parts = []
            for k in range(k_lo, k_hi + 1):
                if k - 1 > m - 1 or k < 1:
                    continue
                combos = _combinations_array(m - 1, k - 1)
                block = np.zeros((combos.shape[0], m), dtype=np.int8)
                block[:, 0] = 1
                if k > 1:
                    block[np.arange(combos.shape[0])[:, None], combos + 1] = 1
                parts.append(block)
            rows = parts
        else:
            rows = [self._weighted_candidates(atom_positions, atom_force, m, k_lo, k_hi)]
        if not rows:
            return np.zeros((0, m), dtype=np.int8)
        x = np.concatenate(rows, axis=0) if len(rows) > 1 else rows[0]

        for pair in constraints.cannot_link:
            a, b = sorted(pair)
            if a in pos and b in pos:
                x = x[x[:, pos[a]] != x[:, pos[b]]]
        return x

    def _weighted_candidates(self, atom_positions, atom_force, m, k_lo, k_hi) -> np.ndarray:
        """Exhaustive side assignment over must-link atoms with size pruning."""
        weights = [len(p) for p in atom_positions]
        suffix = np.concatenate([np.cumsum(weights[::-1])[::-1], [0]])
        rows: list[np.ndarray] = []
        row = np.zeros(m, dtype=np.int8)

        def assign(k: int, size_a: int):
            if size_a > k_hi or size_a + suffix[k] < k_lo:
                return
            if k == len(atom_positions):
                if k_lo <= size_a <= k_hi:
                    rows.append(row.copy())
                return
            for side in (1, 0):
                if atom_force[k] is not None and atom_force[k] != side:
                    continue
                if side:
                    for p in atom_positions[k]:
                        row[p] = 1
                assign(k + 1, size_a + weights[k] * side)
                if side:
                    for p in atom_positions[k]:
                        row[p] = 0

        assign(0, 0)
        if not rows:
            return np.zeros((0, m), dtype=np.int8)
        return np.stack(rows)


def repair_two_groups(
    net: SocialNetwork,
    params: ModelParams,
    partition: Partition,
    group_a: int,
    group_b: int,
    constraints: SolveConstraints | None = None,
) -> Partition:
    """Optimal reassignment of two groups' combined membership, all else fixed.

    Enumerates every two-block split of the union with both sizes in bounds
    (at most C(15, 7) = 6435 candidates at the default bounds) and returns the
    best by objective.  Raises NoFeasibleSplit when nothing is feasible.
    """
    constraints = constraints or SolveConstraints()
    if group_a == group_b:
        raise ValueError("repair needs two distinct groups")
    arrays = _InstanceArrays(net, params)
    engine = _RepairEngine(arrays, constraints)
    vector = arrays.to_vector(partition)
    new_vector, _, _ = engine.best_split(vector, group_a, group_b)
    return arrays.to_partition(new_vector)


# ---------------------------------------------------------------------------
# Randomized construction.


def _random_feasible_vector(
    arrays: _InstanceArrays,
    s: int,
    rng: np.random.Generator,
    constraints: SolveConstraints,
    attempts: int = 200,
) -> np.ndarray:
    """Random feasible assignment with S groups honoring all constraints."""
    bounds = arrays.params.capacity
    n = arrays.n
    if constraints.is_empty():
        sizes = [bounds.lo] * s
        spare = n - bounds.lo * s
        while spare:
            open_groups = [g for g in range(s) if sizes[g] < bounds.hi]
            sizes[int(rng.choice(open_groups))] += 1
            spare -= 1
        order = rng.permutation(n)
        vector = np.empty(n, dtype=np.int64)
        start = 0
        for g, size in enumerate(sizes):
            vector[order[start:start + size]] = g
            start += size
        return vector

    atoms = _must_link_atoms(arrays.ids, constraints)
    for _ in range(attempts):
        sizes = [0] * s
        vector = np.full(n, -1, dtype=np.int64)
        ok = True
        pending = []
        for atom in atoms:
            pins = {constraints.pinned[i] for i in atom if i in constraints.pinned}
            if pins:
                g = pins.pop()
                if g >= s or sizes[g] + len(atom) > bounds.hi:
                    ok = False
                    break
                sizes[g] += len(atom)
                for node_id in atom:
                    vector[arrays.index[node_id]] = g
            else:
                pending.append(atom)
        if not ok:
            continue
        for atom in sorted(pending, key=len, reverse=True):
            open_groups = [
                g for g in range(s)
                if g not in constraints.frozen_groups and sizes[g] + len(atom) <= bounds.hi
            ]
            if not open_groups:
                ok = False
                break
            need = [g for g in open_groups if sizes[g] < bounds.lo]
            g = int(rng.choice(need if need else open_groups))
            sizes[g] += len(atom)
            for node_id in atom:
                vector[arrays.index[node_id]] = g
        if not ok:
            continue
        if any(not (bounds.lo <= size <= bounds.hi) for size in sizes):
            continue
        if _satisfies(vector, arrays, constraints):
            return vector
    raise UnsatisfiableConstraints(
        f"could not construct a feasible start with {s} groups after {attempts} attempts"
    )


def _feasible_counts_for(arrays: _InstanceArrays, constraints: SolveConstraints) -> list[int]:
    bounds = arrays.params.capacity
    feasible = sorted(feasible_group_counts(arrays.n, bounds))
    min_groups = max((g for g in constraints.pinned.values()), default=-1) + 1
    feasible = [s for s in feasible if s >= min_groups]
    if not feasible:
        raise UnsatisfiableConstraints("no feasible group count is compatible with the pinned indices")
    return feasible


# ---------------------------------------------------------------------------
# Restart scaffolding shared by LNS and local search.


def _run_restarts(net, params, config, constraints, algorithm, round_factory):
    start = time.perf_counter()
    if config.time_limit is not None and config.time_limit <= 0:
        raise TimeBudgetZero(f"time_limit must be positive, got {config.time_limit}")
    constraints = constraints or SolveConstraints()
    _check_network(net)
    check_constraints(net, constraints, params.capacity)
    arrays = _InstanceArrays(net, params)
    feasible = _feasible_counts_for(arrays, constraints)

    order_rng = np.random.default_rng(np.random.SeedSequence(config.seed, spawn_key=(0,)))
    s_order = [int(s) for s in order_rng.permutation(feasible)]
    dead: set[int] = set()

    def construct(restart: int, rng: np.random.Generator) -> tuple[int, np.ndarray]:
        # Rotate through the group counts that still admit a feasible start.
        # Tight constraints (everyone pinned, say) can rule a count out
        # entirely; drop it and keep rotating instead of aborting the solve.
        last_error: UnsatisfiableConstraints | None = None
        while True:
            alive = [s for s in s_order if s not in dead]
            if not alive:
                assert last_error is not None
                raise last_error
            s = alive[restart % len(alive)]
            try:
                return s, _random_feasible_vector(arrays, s, rng, constraints)
            except UnsatisfiableConstraints as err:
                dead.add(s)
                last_error = err

    def out_of_time() -> bool:
        return config.time_limit is not None and time.perf_counter() - start >= config.time_limit

    best_vector: np.ndarray | None = None
    best_obj = -np.inf
    trace: list[TraceEntry] = []
    restarts_completed = 0

    for restart in range(config.restarts):
        if out_of_time():
            break
        rng = np.random.default_rng(np.random.SeedSequence(config.seed, spawn_key=(restart + 1,)))
        s, vector = construct(restart, rng)
        objective = arrays.objective_single(vector)
        trace.append(TraceEntry(restart, time.perf_counter() - start, objective))
        attempt_round = round_factory(arrays, constraints, s, rng)

        stall = 0
        while attempt_round is not None and stall < config.stall_limit and not out_of_time():
            improved = attempt_round(vector, objective)
            if improved is None:
                stall += 1
                continue
            vector, objective = improved
            trace.append(TraceEntry(restart, time.perf_counter() - start, objective))
            stall = 0

        restarts_completed = restart + 1
        if objective > best_obj:
            best_obj = objective
            best_vector = vector

    if best_vector is None:
        # Time ran out before the first restart finished constructing.
        rng = np.random.default_rng(np.random.SeedSequence(config.seed, spawn_key=(1,)))
        _, best_vector = construct(0, rng)

    partition = _finalize_partition(arrays.to_partition(best_vector), constraints)
    return SolveResult(
        partition=partition,
        evaluation=evaluate_partition(net, partition, params),
        algorithm=algorithm,
        wall_time=time.perf_counter() - start,
        restarts_completed=restarts_completed,
        improvement_trace=trace,
    )


def solve_lns(
    net: SocialNetwork,
    params: ModelParams,
    config: LnsConfig | None = None,
    constraints: SolveConstraints | None = None,
) -> SolveResult:
    """Large neighborhood search: destroy two random groups, repair exactly.

    Each restart draws a fresh feasible partition whose group count rotates
    through the feasible set in a seeded random order.  A round destroys
    config.destroy_size random non-frozen groups and reassigns their union
    optimally (pairwise for more than two); only strict improvements are
    accepted, and a restart ends after stall_limit fruitless rounds.
    """
    config = config or LnsConfig()

    def round_factory(arrays, cons, s, rng):
        open_groups = [g for g in range(s) if g not in cons.frozen_groups]
        if len(open_groups) < 2:
            return None
        engine = _RepairEngine(arrays, cons)

        def attempt(vector, objective):
            k = min(config.destroy_size, len(open_groups))
            chosen = rng.choice(len(open_groups), size=k, replace=False)
            targets = [open_groups[int(i)] for i in chosen]
            current, current_obj, accepted = vector, objective, False
            for a, b in itertools.combinations(targets, 2):
                try:
                    candidate, _, _ = engine.best_split(current, a, b)
                except NoFeasibleSplit:
                    continue
                candidate_obj = arrays.objective_single(candidate)
                if candidate_obj > current_obj:
                    current, current_obj, accepted = candidate, candidate_obj, True
            return (current, current_obj) if accepted else None

        return attempt

    return _run_restarts(net, params, config, constraints, "lns", round_factory)


def solve_local_search(
    net: SocialNetwork,
    params: ModelParams,
    config: LnsConfig | None = None,
    constraints: SolveConstraints | None = None,
) -> SolveResult:
    """Hill climbing on random cross-group swaps; the time-parity baseline.

    Identical restart scaffolding, seeding, and stopping rules as solve_lns;
    only the move differs: swap one random member of each of two random
    groups, accept on strict improvement.  Swaps preserve group sizes, so each
    restart explores a fixed size vector.
    """
    config = config or LnsConfig()

    def round_factory(arrays, cons, s, rng):
        movable = np.ones(arrays.n, dtype=bool)
        for node_id in cons.pinned:
            movable[arrays.index[node_id]] = False
        for pair in cons.must_link:
            for node_id in pair:
                if node_id in arrays.index:
                    movable[arrays.index[node_id]] = False
        movable_idx = np.nonzero(movable)[0]
        if movable_idx.size < 2:
            return None

        def attempt(vector, objective):
            x = int(movable_idx[int(rng.integers(movable_idx.size))])
            others = movable_idx[vector[movable_idx] != vector[x]]
            if others.size == 0:
                return None
            y = int(others[int(rng.integers(others.size))])
            candidate = vector.copy()
            candidate[x], candidate[y] = candidate[y], candidate[x]
            if cons.cannot_link and not _satisfies(candidate, arrays, cons):
                return None
            candidate_obj = arrays.objective_single(candidate)
            if candidate_obj > objective:
                return candidate, candidate_obj
            return None

        return attempt

    return _run_restarts(net, params, config, constraints, "local_search", round_factory)


# ---------------------------------------------------------------------------
# Non-search baselines.


def _min_feasible_sizes(n: int, bounds: CapacityBounds) -> list[int]:
    """Near-equal sizes at the smallest feasible group count."""
    feasible = feasible_group_counts(n, bounds)
    if not feasible:
        raise InfeasibleBounds(f"no group count fits {n} nodes within ({bounds.lo}, {bounds.hi})")
    s = min(feasible)
    base, extra = divmod(n, s)
    return [base + 1 if g < extra else base for g in range(s)]


def baseline_random(net: SocialNetwork, params: ModelParams, seed: int = 0) -> Partition:
    """Uniformly random assignment at the smallest feasible group count."""
    _check_network(net)
    ids = sorted(net.node_ids())
    sizes = _min_feasible_sizes(len(ids), params.capacity)
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(ids))
    assignment = {}
    cursor = 0
    for g, size in enumerate(sizes):
        for k in order[cursor:cursor + size]:
            assignment[ids[int(k)]] = g
        cursor += size
    return Partition(assignment)


def baseline_even_users(net: SocialNetwork, params: ModelParams, seed: int = 0) -> Partition:
    """Spread users round-robin, then fill non-users into the smallest groups."""
    _check_network(net)
    behavior = net.behavior_of()
    ids = sorted(behavior)
    sizes = _min_feasible_sizes(len(ids), params.capacity)
    s = len(sizes)
    rng = np.random.default_rng(seed)
    users = [i for i in ids if behavior[i].is_user]
    nonusers = [i for i in ids if not behavior[i].is_user]
    rng.shuffle(users)
    rng.shuffle(nonusers)
    cap = max(sizes)
    counts = [0] * s
    assignment = {}
    for k, node_id in enumerate(users):
        g = k % s
        assignment[node_id] = g
        counts[g] += 1
    for node_id in nonusers:
        open_groups = [g for g in range(s) if counts[g] < cap]
        g = min(open_groups, key=lambda g: (counts[g], g))
        assignment[node_id] = g
        counts[g] += 1
    return Partition(assignment)


def baseline_network(net: SocialNetwork, params: ModelParams, seed: int = 0) -> Partition:
    """Greedy nomination clustering: grow each group to capacity around a seed node.

    Each group starts from a random unassigned node, then admits the
    unassigned node with the highest summed pre-tie strength (both directions)
    to its current members, smallest id on ties, until it reaches the size
    ceiling or nodes run out.  Groups left under the size floor then steal the
    weakest-attached members from groups above it.
    """
    _check_network(net)
    behavior = net.behavior_of()
    ids = sorted(behavior)
    bounds = params.capacity
    feasible = feasible_group_counts(len(ids), bounds)
    if not feasible:
        raise InfeasibleBounds(f"no group count fits {len(ids)} nodes within ({bounds.lo}, {bounds.hi})")
    s = min(feasible)
    rng = np.random.default_rng(seed)

    strength: dict[tuple[str, str], float] = {}
    for arc in net.arcs:
        w = params.weight_strong if arc.strength is TieStrength.STRONG else params.weight_weak
        key = (arc.src, arc.dst) if arc.src < arc.dst else (arc.dst, arc.src)
        strength[key] = strength.get(key, 0.0) + w

    def attachment(node_id: str, members: list[str]) -> float:
        total = 0.0
        for member in members:
            key = (node_id, member) if node_id < member else (member, node_id)
            total += strength.get(key, 0.0)
        return total

    unassigned = set(ids)
    groups: list[list[str]] = []
    for _ in range(s):
        seed_node = sorted(unassigned)[int(rng.integers(len(unassigned)))]
        members = [seed_node]
        unassigned.discard(seed_node)
        while len(members) < bounds.hi and unassigned:
            best_node, best_score = None, -1.0
            for i in sorted(unassigned):
                score = attachment(i, members)
                if score > best_score:
                    best_node, best_score = i, score
            members.append(best_node)
            unassigned.discard(best_node)
        groups.append(members)

    while any(len(g) < bounds.lo for g in groups):
        under = min(range(s), key=lambda g: (len(groups[g]), g))
        donors = [g for g in range(s) if len(groups[g]) > bounds.lo]
        moves = [
            (attachment(member, [x for x in groups[g] if x != member]), g, member)
            for g in donors
            for member in groups[g]
        ]
        _, g, member = min(moves, key=lambda t: (t[0], t[2]))
        groups[g].remove(member)
        groups[under].append(member)

    return Partition({node_id: g for g, members in enumerate(groups) for node_id in members})
