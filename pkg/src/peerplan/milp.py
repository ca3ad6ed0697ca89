"""Mixed-integer linear program export for the grouping problem.

The model fixes the number of groups S and decides co-membership through
binary pair variables z_ij, so it can be handed to an external MILP solver.
Facilitators are never part of exported models; when cross-checking a model
against evaluate_partition, evaluate with include_facilitator=False.
"""

from __future__ import annotations

import dataclasses
import itertools
import re
from dataclasses import dataclass, field
from pathlib import Path

from .model import (
    Behavior,
    ModelParams,
    Partition,
    PeerplanError,
    SocialNetwork,
    TieStrength,
    feasible_group_counts,
    validate_network,
)
from .dynamics import apply_intervention, tie_transition
from .solvers import InfeasibleBounds
from . import fileio


class InfeasibleS(PeerplanError):
    """Requested group count admits no partition within the capacity bounds."""


class SinkUnwritable(PeerplanError):
    """The export destination could not be written."""


@dataclass(frozen=True)
class MilpVariable:
    name: str
    kind: str  # "binary" or "continuous"
    bounds: tuple[float, float] = (0.0, 1.0)


@dataclass(frozen=True)
class LinearConstraint:
    name: str
    coeffs: dict[str, float]
    sense: str  # "<=", "=", ">="
    rhs: float


@dataclass
class MilpModel:
    variables: list[MilpVariable] = field(default_factory=list)
    constraints: list[LinearConstraint] = field(default_factory=list)
    objective: dict[str, float] = field(default_factory=dict)
    objective_constant: float = 0.0
    sense: str = "maximize"
    metadata: dict = field(default_factory=dict)

    def check(self) -> None:
        names = [v.name for v in self.variables]
        declared = set(names)
        if len(declared) != len(names):
            raise ValueError("duplicate variable names")
        row_names = [c.name for c in self.constraints]
        if len(set(row_names)) != len(row_names):
            raise ValueError("duplicate constraint names")
        for row in self.constraints:
            unknown = set(row.coeffs) - declared
            if unknown:
                raise ValueError(f"constraint {row.name} references unknown {sorted(unknown)}")
            if row.sense not in ("<=", "=", ">="):
                raise ValueError(f"constraint {row.name} has bad sense {row.sense!r}")
        unknown = set(self.objective) - declared
        if unknown:
            raise ValueError(f"objective references unknown {sorted(unknown)}")


_SAFE_NAME = re.compile(r"[A-Za-z][A-Za-z0-9.]*\Z")


def _node_names(ids: list[str]) -> dict[str, str]:
    """LP-safe variable-name fragment per node.

    Raw ids are used when every one is alphanumeric (underscores excluded so
    composed names split unambiguously); otherwise all nodes fall back to
    positional names in sorted-id order, keeping the mapping deterministic.
    """
    if all(_SAFE_NAME.match(i) for i in ids):
        return {i: i for i in ids}
    return {node_id: f"v{k}" for k, node_id in enumerate(ids)}


def build_milp(net: SocialNetwork, params: ModelParams, s: int) -> MilpModel:
    violations = validate_network(net)
    if violations:
        raise ValueError(f"invalid network: {violations}")
    n = len(net.nodes)
    if s not in feasible_group_counts(n, params.capacity):
        raise InfeasibleS(
            f"{s} groups cannot hold {n} nodes within "
            f"[{params.capacity.lo},{params.capacity.hi}]"
        )

    ids = sorted(net.node_ids())
    name_of = _node_names(ids)
    behavior = net.behavior_of()
    pre = net.pre_ties()
    lo, hi = params.capacity.lo, params.capacity.hi
    w_s, w_w = params.weight_strong, params.weight_weak

    model = MilpModel(metadata={
        "instance_hash": fileio.network_hash(net),
        "params": fileio.params_to_obj(params),
        "s": s,
        "node_names": dict(name_of),
    })
    variables = model.variables
    rows = model.constraints

    def z_name(a: str, b: str) -> str:
        a, b = (a, b) if a < b else (b, a)
        return f"z_{name_of[a]}_{name_of[b]}"

    pairs = [(i, j) for i in ids for j in ids if i != j]
    for a, b in itertools.combinations(ids, 2):
        variables.append(MilpVariable(z_name(a, b), "binary"))
    for j in ids:
        variables.append(MilpVariable(f"l_{name_of[j]}", "binary"))
    for prefix in ("xs", "xw", "xn"):
        for i, j in pairs:
            variables.append(MilpVariable(f"{prefix}_{name_of[i]}_{name_of[j]}", "binary"))
    for i, j in pairs:
        variables.append(MilpVariable(f"w_{name_of[i]}_{name_of[j]}", "continuous"))
    for prefix in ("qs", "qw"):
        for i, j in pairs:
            for i2 in ids:
                if i2 != j:
                    variables.append(MilpVariable(
                        f"{prefix}_{name_of[i2]}_{name_of[i]}_{name_of[j]}", "continuous"))

    # (a) capacity per node, with the diagonal z_jj == 1 folded into the bounds.
    for j in ids:
        coeffs = {z_name(i, j): 1.0 for i in ids if i != j}
        if coeffs:
            rows.append(LinearConstraint(f"cap_lo_{name_of[j]}", coeffs, ">=", float(lo - 1)))
            rows.append(LinearConstraint(f"cap_hi_{name_of[j]}", dict(coeffs), "<=", float(hi - 1)))

    # (b) transitivity over every ordered triple of distinct nodes.
    for i, j, k in itertools.permutations(ids, 3):
        rows.append(LinearConstraint(
            f"tri_{name_of[i]}_{name_of[j]}_{name_of[k]}",
            _merged({z_name(i, j): 1.0, z_name(j, k): 1.0, z_name(k, i): -1.0}),
            "<=", 1.0))

    # (c) post-tie indicators as affine equalities in z. For a fixed pair the
    # behaviors and pre-tie are data, so the tie table is a function of the
    # single binary z alone; any such function interpolates exactly as
    # f(z) = f(0) + (f(1) - f(0)) z. Written out per case: same-behavior pairs
    # give xs = s_s + z (1 - s_s), mixed pairs give xs = z s_s, and xw mirrors
    # with the both-nonuser weak survival term.
    for i, j in pairs:
        same = tie_transition(behavior[i], behavior[j], pre.get((i, j)), True)
        sep = tie_transition(behavior[i], behavior[j], pre.get((i, j)), False)
        for prefix, level in (("xs", TieStrength.STRONG), ("xw", TieStrength.WEAK)):
            at1 = 1.0 if same == level else 0.0
            at0 = 1.0 if sep == level else 0.0
            coeffs = _merged({f"{prefix}_{name_of[i]}_{name_of[j]}": 1.0,
                              z_name(i, j): -(at1 - at0)})
            rows.append(LinearConstraint(f"{prefix}_def_{name_of[i]}_{name_of[j]}", coeffs, "=", at0))

    # (d) each ordered pair lands in exactly one post-tie state.
    for i, j in pairs:
        rows.append(LinearConstraint(
            f"onehot_{name_of[i]}_{name_of[j]}",
            {f"xn_{name_of[i]}_{name_of[j]}": 1.0,
             f"xw_{name_of[i]}_{name_of[j]}": 1.0,
             f"xs_{name_of[i]}_{name_of[j]}": 1.0},
            "=", 1.0))

    # (e) normalization, bilinear-free: w_ij * den_j = raw_ij becomes
    # sum_{i2}(W_s qs_{i2 i j} + W_w qw_{i2 i j}) = W_s xs_ij + W_w xw_ij
    # with q standing for the product w_ij * x_{i2 j}.
    for i, j in pairs:
        coeffs: dict[str, float] = {}
        for i2 in ids:
            if i2 != j:
                coeffs[f"qs_{name_of[i2]}_{name_of[i]}_{name_of[j]}"] = w_s
                coeffs[f"qw_{name_of[i2]}_{name_of[i]}_{name_of[j]}"] = w_w
        coeffs[f"xs_{name_of[i]}_{name_of[j]}"] = -w_s
        coeffs[f"xw_{name_of[i]}_{name_of[j]}"] = -w_w
        rows.append(LinearConstraint(f"norm_{name_of[i]}_{name_of[j]}", coeffs, "=", 0.0))

    # exact continuous-times-binary product rows for each q.
    for prefix, x_prefix in (("qs", "xs"), ("qw", "xw")):
        for i, j in pairs:
            w_var = f"w_{name_of[i]}_{name_of[j]}"
            for i2 in ids:
                if i2 == j:
                    continue
                q_var = f"{prefix}_{name_of[i2]}_{name_of[i]}_{name_of[j]}"
                x_var = f"{x_prefix}_{name_of[i2]}_{name_of[j]}"
                tag = f"{name_of[i2]}_{name_of[i]}_{name_of[j]}"
                rows.append(LinearConstraint(f"{prefix}_le_x_{tag}", {q_var: 1.0, x_var: -1.0}, "<=", 0.0))
                rows.append(LinearConstraint(f"{prefix}_le_w_{tag}", {q_var: 1.0, w_var: -1.0}, "<=", 0.0))
                rows.append(LinearConstraint(
                    f"{prefix}_ge_{tag}", {q_var: 1.0, w_var: -1.0, x_var: -1.0}, ">=", -1.0))

    # When den_j = 0 the normalization row degenerates to 0 = 0, matching the
    # all-zero convention only if w is forced down explicitly.
    for i, j in pairs:
        rows.append(LinearConstraint(
            f"wcap_{name_of[i]}_{name_of[j]}",
            {f"w_{name_of[i]}_{name_of[j]}": 1.0,
             f"xs_{name_of[i]}_{name_of[j]}": -1.0,
             f"xw_{name_of[i]}_{name_of[j]}": -1.0},
            "<=", 0.0))

    # Group-count pinning: l_j marks the lexicographically first member of its
    # group, so the leaders sum to the number of groups.
    for a, b in itertools.combinations(ids, 2):
        rows.append(LinearConstraint(
            f"lpair_{name_of[a]}_{name_of[b]}",
            {f"l_{name_of[b]}": 1.0, z_name(a, b): 1.0}, "<=", 1.0))
    for j in ids:
        coeffs = {f"l_{name_of[j]}": 1.0}
        for i in ids:
            if i < j:
                coeffs[z_name(i, j)] = coeffs.get(z_name(i, j), 0.0) + 1.0
        rows.append(LinearConstraint(f"lmin_{name_of[j]}", coeffs, ">=", 1.0))
    rows.append(LinearConstraint(
        "lcount", {f"l_{name_of[j]}": 1.0 for j in ids}, "=", float(s)))

    # (f) expected non-users: the constant counts current non-users, user
    # pressure on a non-user subtracts, non-user pressure on a user adds.
    objective = model.objective
    for i, j in pairs:
        if behavior[i].is_user and not behavior[j].is_user:
            objective[f"w_{name_of[i]}_{name_of[j]}"] = -params.flip_to_user
        elif not behavior[i].is_user and behavior[j].is_user:
            objective[f"w_{name_of[i]}_{name_of[j]}"] = params.flip_to_nonuser
    model.objective_constant = float(net.nonuser_count())

    model.check()
    return model


def _merged(coeffs: dict[str, float]) -> dict[str, float]:
    """Drop exact-zero coefficients so rows stay minimal and deterministic."""
    return {k: v for k, v in coeffs.items() if v != 0.0}


# ---------------------------------------------------------------------------
# Cross-checking helpers


def assignment_point(model: MilpModel, net: SocialNetwork, partition: Partition,
                     params: ModelParams) -> dict[str, float]:
    """The feasible point a concrete partition induces in model coordinates."""
    name_of = model.metadata["node_names"]
    ids = sorted(net.node_ids())
    behavior = net.behavior_of()
    pre = net.pre_ties()
    assign = partition.assignment
    point: dict[str, float] = {}
    for a, b in itertools.combinations(ids, 2):
        point[f"z_{name_of[a]}_{name_of[b]}"] = 1.0 if assign[a] == assign[b] else 0.0
    for j in ids:
        leads = all(assign[i] != assign[j] for i in ids if i < j)
        point[f"l_{name_of[j]}"] = 1.0 if leads else 0.0
    bare = dataclasses.replace(params, include_facilitator=False)
    weights = apply_intervention(net, partition, bare).weights
    for i in ids:
        for j in ids:
            if i == j:
                continue
            post = tie_transition(behavior[i], behavior[j], pre.get((i, j)),
                                  assign[i] == assign[j])
            point[f"xs_{name_of[i]}_{name_of[j]}"] = 1.0 if post == TieStrength.STRONG else 0.0
            point[f"xw_{name_of[i]}_{name_of[j]}"] = 1.0 if post == TieStrength.WEAK else 0.0
            point[f"xn_{name_of[i]}_{name_of[j]}"] = 1.0 if post is None else 0.0
            point[f"w_{name_of[i]}_{name_of[j]}"] = weights.get((i, j), 0.0)
    for i in ids:
        for j in ids:
            if i == j:
                continue
            w_val = point[f"w_{name_of[i]}_{name_of[j]}"]
            for i2 in ids:
                if i2 == j:
                    continue
                for prefix, x_prefix in (("qs", "xs"), ("qw", "xw")):
                    x_val = point[f"{x_prefix}_{name_of[i2]}_{name_of[j]}"]
                    point[f"{prefix}_{name_of[i2]}_{name_of[i]}_{name_of[j]}"] = w_val * x_val
    return point


def point_violations(model: MilpModel, point: dict[str, float], tol: float = 1e-9) -> list[str]:
    """Names of constraints or bounds the point breaks beyond tol."""
    broken = []
    for var in model.variables:
        value = point.get(var.name, 0.0)
        if value < var.bounds[0] - tol or value > var.bounds[1] + tol:
            broken.append(f"bounds:{var.name}")
        elif var.kind == "binary" and min(abs(value), abs(value - 1.0)) > tol:
            broken.append(f"integrality:{var.name}")
    for row in model.constraints:
        lhs = sum(coef * point.get(name, 0.0) for name, coef in row.coeffs.items())
        gap = lhs - row.rhs
        if row.sense == "<=" and gap > tol:
            broken.append(row.name)
        elif row.sense == ">=" and gap < -tol:
            broken.append(row.name)
        elif row.sense == "=" and abs(gap) > tol:
            broken.append(row.name)
    return broken


def objective_value(model: MilpModel, point: dict[str, float]) -> float:
    return model.objective_constant + sum(
        coef * point.get(name, 0.0) for name, coef in model.objective.items())


# ---------------------------------------------------------------------------
# Writers


_NUM = "%.17g"
_WRAP = 200


def _lp_terms(coeffs: dict[str, float], order: dict[str, int]) -> list[str]:
    terms = []
    for name in sorted(coeffs, key=order.__getitem__):
        value = coeffs[name]
        sign = "-" if value < 0 else "+"
        terms.append(f"{sign} {_NUM % abs(value)} {name}")
    return terms


def _wrap_row(head: str, tokens: list[str]) -> list[str]:
    lines = [head]
    for token in tokens:
        if len(lines[-1]) + 1 + len(token) > _WRAP:
            lines.append(" " + token)
        else:
            lines[-1] = f"{lines[-1]} {token}"
    return lines


def write_lp(model: MilpModel, destination: str | Path) -> None:
    """CPLEX LP text format; identical models serialize byte-identically."""
    model.check()
    order = {v.name: k for k, v in enumerate(model.variables)}
    lines = ["\\ grouping MILP export"]
    for key in sorted(model.metadata):
        if key != "node_names":
            lines.append(f"\\ {key}: {model.metadata[key]}")
    lines.append("Maximize" if model.sense == "maximize" else "Minimize")
    obj_tokens = _lp_terms(model.objective, order)
    if model.objective_constant != 0.0:
        sign = "-" if model.objective_constant < 0 else "+"
        obj_tokens.append(f"{sign} {_NUM % abs(model.objective_constant)}")
    if not obj_tokens:
        obj_tokens.append("0")
    lines.extend(_wrap_row(" obj:", obj_tokens))
    lines.append("Subject To")
    for row in model.constraints:
        tokens = _lp_terms(row.coeffs, order)
        tokens.append(row.sense)
        tokens.append(_NUM % row.rhs)
        lines.extend(_wrap_row(f" {row.name}:", tokens))
    continuous = [v for v in model.variables if v.kind == "continuous"]
    if continuous:
        lines.append("Bounds")
        for var in continuous:
            lines.append(f" {_NUM % var.bounds[0]} <= {var.name} <= {_NUM % var.bounds[1]}")
    binaries = [v for v in model.variables if v.kind == "binary"]
    if binaries:
        lines.append("Binaries")
        lines.extend(_wrap_row(" " + binaries[0].name, [v.name for v in binaries[1:]]))
    lines.append("End")
    _write_text(destination, "\n".join(lines) + "\n")


def write_mps(model: MilpModel, destination: str | Path) -> None:
    """Free-format MPS variant; the objective constant rides on the RHS row."""
    model.check()
    lines = ["NAME grouping", "OBJSENSE", "    " + model.sense.upper()[:3], "ROWS", " N  obj"]
    sense_tag = {"<=": "L", ">=": "G", "=": "E"}
    for row in model.constraints:
        lines.append(f" {sense_tag[row.sense]}  {row.name}")
    entries: dict[str, list[tuple[str, float]]] = {v.name: [] for v in model.variables}
    for name, coef in model.objective.items():
        entries[name].append(("obj", coef))
    for row in model.constraints:
        for name, coef in row.coeffs.items():
            entries[name].append((row.name, coef))
    lines.append("COLUMNS")
    in_int = False
    marker = 0
    for var in model.variables:
        if (var.kind == "binary") != in_int:
            state = "INTORG" if not in_int else "INTEND"
            lines.append(f"    MARKER{marker}  'MARKER'  '{state}'")
            in_int = not in_int
            marker += 1
        # a variable absent from every row still needs a column entry
        rows_here = entries[var.name] or [("obj", 0.0)]
        for row_name, coef in rows_here:
            lines.append(f"    {var.name}  {row_name}  {_NUM % coef}")
    if in_int:
        lines.append(f"    MARKER{marker}  'MARKER'  'INTEND'")
    lines.append("RHS")
    if model.objective_constant != 0.0:
        lines.append(f"    rhs  obj  {_NUM % -model.objective_constant}")
    for row in model.constraints:
        if row.rhs != 0.0:
            lines.append(f"    rhs  {row.name}  {_NUM % row.rhs}")
    lines.append("BOUNDS")
    for var in model.variables:
        if var.kind == "binary":
            lines.append(f" BV bnd  {var.name}")
        else:
            if var.bounds[0] != 0.0:
                lines.append(f" LO bnd  {var.name}  {_NUM % var.bounds[0]}")
            lines.append(f" UP bnd  {var.name}  {_NUM % var.bounds[1]}")
    lines.append("ENDATA")
    _write_text(destination, "\n".join(lines) + "\n")


def _write_text(destination: str | Path, text: str) -> None:
    try:
        Path(destination).write_text(text)
    except OSError as exc:
        raise SinkUnwritable(f"cannot write {destination}: {exc}") from exc


def export_instance(net: SocialNetwork, params: ModelParams, out_dir: str | Path,
                    instance_name: str, s_values: list[int] | None = None,
                    mps: bool = False) -> list[Path]:
    """One model file per feasible group count, named <instance>.<S>.lp."""
    feasible = feasible_group_counts(len(net.nodes), params.capacity)
    if s_values is None:
        s_values = sorted(feasible)
        if not s_values:
            raise InfeasibleBounds(
                f"no group count fits {len(net.nodes)} nodes within "
                f"[{params.capacity.lo},{params.capacity.hi}]")
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise SinkUnwritable(f"cannot create {out_dir}: {exc}") from exc
    written = []
    for s in s_values:
        model = build_milp(net, params, s)
        suffix = "mps" if mps else "lp"
        path = out_dir / f"{instance_name}.{s}.{suffix}"
        if mps:
            write_mps(model, path)
        else:
            write_lp(model, path)
        written.append(path)
    return written
