"""Peer-group planning: who should sit with whom so fewer people end up using.

Behavior-labeled friendship networks go in; capacity-bounded groupings come
out, scored by the expected number of non-users once group formation has
rewired the ties.
"""

from .model import (
    Arc,
    Behavior,
    CapacityBounds,
    InfeasiblePartition,
    ModelParams,
    Node,
    Partition,
    PeerplanError,
    SocialNetwork,
    TieStrength,
    feasible_group_counts,
    validate_network,
    validate_partition,
)
from .dynamics import (
    WeightedNetwork,
    WeightedNode,
    apply_intervention,
    facilitator_id,
    tie_transition,
)
from .influence import (
    Evaluation,
    FlipRisk,
    SimulationResult,
    UnnormalizedInput,
    expected_nonusers,
    flip_profile,
    simulate,
    success,
)
from .solvers import (
    InfeasibleBounds,
    InstanceTooLarge,
    LnsConfig,
    NoFeasibleSplit,
    SolveConstraints,
    SolveResult,
    TimeBudgetZero,
    TraceEntry,
    UnsatisfiableConstraints,
    baseline_even_users,
    baseline_network,
    baseline_random,
    check_constraints,
    evaluate_partition,
    repair_two_groups,
    solve_exact,
    solve_lns,
    solve_local_search,
)
from .generate import BadDegree, DecorationParams, WsParams, decorate, generate_ws
from .milp import (
    InfeasibleS,
    MilpModel,
    SinkUnwritable,
    assignment_point,
    build_milp,
    export_instance,
    objective_value,
    point_violations,
    write_lp,
    write_mps,
)
from .fileio import BadInputFile, network_hash
from .store import ConflictingUpdate, NotFound, Roster, RosterStore, StorageFull

__version__ = "0.1.0"

__all__ = [
    "Arc",
    "BadDegree",
    "BadInputFile",
    "Behavior",
    "CapacityBounds",
    "ConflictingUpdate",
    "DecorationParams",
    "Evaluation",
    "FlipRisk",
    "InfeasibleBounds",
    "InfeasiblePartition",
    "InfeasibleS",
    "InstanceTooLarge",
    "LnsConfig",
    "MilpModel",
    "ModelParams",
    "NoFeasibleSplit",
    "Node",
    "NotFound",
    "Partition",
    "PeerplanError",
    "Roster",
    "RosterStore",
    "SimulationResult",
    "SinkUnwritable",
    "SocialNetwork",
    "SolveConstraints",
    "SolveResult",
    "StorageFull",
    "TieStrength",
    "TimeBudgetZero",
    "TraceEntry",
    "UnnormalizedInput",
    "UnsatisfiableConstraints",
    "WeightedNetwork",
    "WeightedNode",
    "WsParams",
    "apply_intervention",
    "assignment_point",
    "baseline_even_users",
    "baseline_network",
    "baseline_random",
    "build_milp",
    "check_constraints",
    "decorate",
    "evaluate_partition",
    "expected_nonusers",
    "export_instance",
    "facilitator_id",
    "feasible_group_counts",
    "flip_profile",
    "generate_ws",
    "network_hash",
    "objective_value",
    "point_violations",
    "repair_two_groups",
    "simulate",
    "solve_exact",
    "solve_lns",
    "solve_local_search",
    "success",
    "tie_transition",
    "validate_network",
    "validate_partition",
    "write_lp",
    "write_mps",
]
