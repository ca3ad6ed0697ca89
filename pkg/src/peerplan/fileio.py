"""File formats: network/partition/constraints/result JSON documents and CSV import.

Serialized solve results intentionally omit wall-clock timing so identical
(instance, algo, seed, constraints) runs produce byte-identical files; timing
stays on the in-memory SolveResult only.
"""

from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path

from .model import (
    Arc,
    Behavior,
    CapacityBounds,
    ModelParams,
    Node,
    Partition,
    PeerplanError,
    SocialNetwork,
    TieStrength,
    validate_network,
)
from .influence import Evaluation, FlipRisk
from .solvers import SolveConstraints, SolveResult, TraceEntry

_TIE_FROM_LABEL = {"strong": TieStrength.STRONG, "weak": TieStrength.WEAK}


class BadInputFile(PeerplanError):
    """An input document failed to parse or violated its schema."""


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise BadInputFile(message)


def _check_keys(obj: dict, allowed: set[str], required: set[str], what: str) -> None:
    _require(isinstance(obj, dict), f"{what} must be an object")
    extra = set(obj) - allowed
    _require(not extra, f"{what} has unknown fields {sorted(extra)}")
    missing = required - set(obj)
    _require(not missing, f"{what} is missing fields {sorted(missing)}")


# ---------------------------------------------------------------------------
# SocialNetwork


def network_to_obj(net: SocialNetwork) -> dict:
    return {
        "nodes": [{"id": n.id, "behavior": n.behavior.value} for n in net.nodes],
        "ties": [
            {"from": a.src, "to": a.dst, "strength": a.strength.value} for a in net.arcs
        ],
    }


def network_from_obj(obj, validate: bool = True) -> SocialNetwork:
    _check_keys(obj, {"nodes", "ties"}, {"nodes", "ties"}, "network")
    _require(isinstance(obj["nodes"], list), "network.nodes must be a list")
    _require(isinstance(obj["ties"], list), "network.ties must be a list")
    nodes = []
    for entry in obj["nodes"]:
        _check_keys(entry, {"id", "behavior"}, {"id", "behavior"}, "node")
        _require(isinstance(entry["id"], str) and entry["id"], "node id must be a non-empty string")
        _require(entry["behavior"] in ("user", "non_user"), f"bad behavior {entry['behavior']!r}")
        nodes.append(Node(entry["id"], Behavior(entry["behavior"])))
    arcs = []
    for entry in obj["ties"]:
        _check_keys(entry, {"from", "to", "strength"}, {"from", "to", "strength"}, "tie")
        _require(isinstance(entry["from"], str) and isinstance(entry["to"], str), "tie endpoints must be strings")
        _require(entry["strength"] in ("strong", "weak"), f"bad strength {entry['strength']!r}")
        arcs.append(Arc(entry["from"], entry["to"], _TIE_FROM_LABEL[entry["strength"]]))
    net = SocialNetwork(nodes=tuple(nodes), arcs=tuple(arcs))
    if validate:
        violations = validate_network(net)
        _require(not violations, f"invalid network: {'; '.join(map(str, violations))}")
    return net


def network_hash(net: SocialNetwork) -> str:
    """Stable content hash of the serialized network document."""
    payload = json.dumps(network_to_obj(net), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode()).hexdigest()


# ---------------------------------------------------------------------------
# Partition


def partition_to_obj(partition: Partition) -> dict:
    return {"assignment": dict(sorted(partition.assignment.items()))}


def partition_from_obj(obj) -> Partition:
    _check_keys(obj, {"assignment"}, {"assignment"}, "partition")
    assignment = obj["assignment"]
    _require(isinstance(assignment, dict), "partition.assignment must be an object")
    out = {}
    for node_id, group in assignment.items():
        _require(isinstance(group, int) and not isinstance(group, bool) and group >= 0,
                 f"group index for {node_id!r} must be a non-negative integer")
        out[node_id] = group
    return Partition(out)


# ---------------------------------------------------------------------------
# ModelParams


def params_to_obj(params: ModelParams) -> dict:
    return {
        "flip_to_user": params.flip_to_user,
        "flip_to_nonuser": params.flip_to_nonuser,
        "weight_strong": params.weight_strong,
        "weight_weak": params.weight_weak,
        "capacity": {"lo": params.capacity.lo, "hi": params.capacity.hi},
        "include_facilitator": params.include_facilitator,
    }


def params_from_obj(obj, base: ModelParams | None = None) -> ModelParams:
    """Params document, with missing fields taken from base (or the defaults)."""
    base = base or ModelParams()
    allowed = {
        "flip_to_user", "flip_to_nonuser", "weight_strong", "weight_weak",
        "capacity", "include_facilitator",
    }
    _check_keys(obj, allowed, set(), "params")
    capacity = base.capacity
    if "capacity" in obj:
        cap = obj["capacity"]
        _check_keys(cap, {"lo", "hi"}, {"lo", "hi"}, "capacity")
        _require(all(isinstance(cap[k], int) and not isinstance(cap[k], bool) for k in ("lo", "hi")),
                 "capacity bounds must be integers")
        try:
            capacity = CapacityBounds(cap["lo"], cap["hi"])
        except ValueError as exc:
            raise BadInputFile(str(exc)) from exc
    numbers = {}
    for key in ("flip_to_user", "flip_to_nonuser", "weight_strong", "weight_weak"):
        if key in obj:
            _require(isinstance(obj[key], (int, float)) and not isinstance(obj[key], bool),
                     f"{key} must be a number")
            numbers[key] = float(obj[key])
        else:
            numbers[key] = getattr(base, key)
    include = obj.get("include_facilitator", base.include_facilitator)
    _require(isinstance(include, bool), "include_facilitator must be a boolean")
    try:
        return ModelParams(capacity=capacity, include_facilitator=include, **numbers)
    except ValueError as exc:
        raise BadInputFile(str(exc)) from exc


# ---------------------------------------------------------------------------
# SolveConstraints


def constraints_to_obj(constraints: SolveConstraints) -> dict:
    return {
        "pinned": dict(sorted(constraints.pinned.items())),
        "must_link": sorted(sorted(pair) for pair in constraints.must_link),
        "cannot_link": sorted(sorted(pair) for pair in constraints.cannot_link),
        "frozen_groups": sorted(constraints.frozen_groups),
    }


def constraints_from_obj(obj) -> SolveConstraints:
    allowed = {"pinned", "must_link", "cannot_link", "frozen_groups"}
    _check_keys(obj, allowed, set(), "constraints")
    pinned = obj.get("pinned", {})
    _require(isinstance(pinned, dict), "constraints.pinned must be an object")
    for node_id, group in pinned.items():
        _require(isinstance(group, int) and not isinstance(group, bool) and group >= 0,
                 f"pinned group for {node_id!r} must be a non-negative integer")

    def pair_set(key: str) -> set[frozenset[str]]:
        entries = obj.get(key, [])
        _require(isinstance(entries, list), f"constraints.{key} must be a list")
        pairs = set()
        for entry in entries:
            _require(
                isinstance(entry, list) and len(entry) == 2
                and all(isinstance(x, str) for x in entry) and entry[0] != entry[1],
                f"constraints.{key} entries must be pairs of two distinct node ids",
            )
            pairs.add(frozenset(entry))
        return pairs

    frozen = obj.get("frozen_groups", [])
    _require(isinstance(frozen, list) and all(
        isinstance(g, int) and not isinstance(g, bool) and g >= 0 for g in frozen),
        "constraints.frozen_groups must be a list of non-negative integers")
    return SolveConstraints(
        pinned=dict(pinned),
        must_link=pair_set("must_link"),
        cannot_link=pair_set("cannot_link"),
        frozen_groups=set(frozen),
    )


# ---------------------------------------------------------------------------
# Evaluation / SolveResult


def evaluation_to_obj(evaluation: Evaluation, include_partition: bool = True) -> dict:
    obj = {
        "expected_nonusers": evaluation.expected_nonusers,
        "success": evaluation.success,
        "flips": {
            node_id: {"become_user": risk.become_user, "become_nonuser": risk.become_nonuser}
            for node_id, risk in sorted(evaluation.flips.items())
        },
    }
    if include_partition:
        obj["partition"] = partition_to_obj(evaluation.partition_echo)
    return obj


def evaluation_from_obj(obj, partition: Partition | None = None) -> Evaluation:
    allowed = {"expected_nonusers", "success", "flips", "partition"}
    required = {"expected_nonusers", "success", "flips"}
    _check_keys(obj, allowed, required, "evaluation")
    if partition is None:
        _require("partition" in obj, "evaluation needs a partition echo")
        partition = partition_from_obj(obj["partition"])
    flips = {}
    _require(isinstance(obj["flips"], dict), "evaluation.flips must be an object")
    for node_id, risk in obj["flips"].items():
        _check_keys(risk, {"become_user", "become_nonuser"}, {"become_user", "become_nonuser"}, "flip risk")
        flips[node_id] = FlipRisk(float(risk["become_user"]), float(risk["become_nonuser"]))
    return Evaluation(
        expected_nonusers=float(obj["expected_nonusers"]),
        success=float(obj["success"]),
        flips=flips,
        partition_echo=partition,
    )


def solve_result_to_obj(result: SolveResult) -> dict:
    return {
        "algorithm": result.algorithm,
        "partition": partition_to_obj(result.partition),
        "evaluation": evaluation_to_obj(result.evaluation, include_partition=False),
        "restarts_completed": result.restarts_completed,
        "improvement_trace": [
            {"restart": entry.restart, "objective": entry.objective}
            for entry in result.improvement_trace
        ],
    }


def solve_result_from_obj(obj) -> SolveResult:
    allowed = {"algorithm", "partition", "evaluation", "restarts_completed", "improvement_trace"}
    _check_keys(obj, allowed, allowed, "solve result")
    partition = partition_from_obj(obj["partition"])
    trace = []
    for entry in obj["improvement_trace"]:
        _check_keys(entry, {"restart", "objective"}, {"restart", "objective"}, "trace entry")
        trace.append(TraceEntry(int(entry["restart"]), 0.0, float(entry["objective"])))
    return SolveResult(
        partition=partition,
        evaluation=evaluation_from_obj(obj["evaluation"], partition=partition),
        algorithm=str(obj["algorithm"]),
        wall_time=0.0,
        restarts_completed=int(obj["restarts_completed"]),
        improvement_trace=trace,
    )


# ---------------------------------------------------------------------------
# Files


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def write_json(path: str | Path, obj) -> None:
    Path(path).write_text(dump_json(obj))


def read_json(path: str | Path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise BadInputFile(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise BadInputFile(f"{path} is not valid JSON: {exc}") from exc


def read_network_file(path: str | Path) -> SocialNetwork:
    return network_from_obj(read_json(path))


def read_partition_file(path: str | Path) -> Partition:
    return partition_from_obj(read_json(path))


def read_constraints_file(path: str | Path) -> SolveConstraints:
    return constraints_from_obj(read_json(path))


def read_network_csv(nodes_path: str | Path, ties_path: str | Path) -> SocialNetwork:
    """Spreadsheet import: nodes CSV (id,behavior) plus tie CSV (from,to,strength)."""

    def rows(path: str | Path, fields: tuple[str, ...]) -> list[dict]:
        try:
            with open(path, newline="") as handle:
                reader = csv.DictReader(handle)
                _require(reader.fieldnames is not None and tuple(reader.fieldnames) == fields,
                         f"{path} must have header {','.join(fields)}")
                return [row for row in reader]
        except OSError as exc:
            raise BadInputFile(f"cannot read {path}: {exc}") from exc

    obj = {
        "nodes": [{"id": row["id"], "behavior": row["behavior"]} for row in rows(nodes_path, ("id", "behavior"))],
        "ties": [
            {"from": row["from"], "to": row["to"], "strength": row["strength"]}
            for row in rows(ties_path, ("from", "to", "strength"))
        ],
    }
    return network_from_obj(obj)
