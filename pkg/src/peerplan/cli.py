"""Command-line interface.

Errors leave on stderr as a single JSON object {"code", "message"}; exit codes
are 2 for infeasible instances, 3 for bad input files, 4 for constraint
conflicts, 1 for anything else. Result files never embed wall-clock timing,
so repeating a seeded command reproduces them byte for byte.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from pathlib import Path

from .model import (
    CapacityBounds,
    InfeasiblePartition,
    ModelParams,
    PeerplanError,
    SocialNetwork,
)
from .dynamics import apply_intervention
from .influence import expected_nonusers, simulate
from .solvers import (
    InfeasibleBounds,
    InstanceTooLarge,
    LnsConfig,
    NoFeasibleSplit,
    SolveConstraints,
    SolveResult,
    UnsatisfiableConstraints,
    baseline_even_users,
    baseline_network,
    baseline_random,
    evaluate_partition,
    solve_exact,
    solve_lns,
    solve_local_search,
)
from .generate import BadDegree, DecorationParams, WsParams, decorate, generate_ws
from .milp import InfeasibleS, SinkUnwritable, export_instance
from . import benchmark as benchmark_mod
from . import fileio
from .fileio import BadInputFile


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors, which would collide with the
    # infeasible-instance code; route through the normal error path instead.
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="peerplan", description="Peer-group planning tools.")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="sample a small-world instance")
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--k", type=int, default=4)
    gen.add_argument("--p", type=float, default=0.25)
    gen.add_argument("--user-ratio", type=float, default=0.68)
    gen.add_argument("--strong-ratio", type=float, default=0.5)
    gen.add_argument("--reciprocity", type=float, default=1.0)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True)

    def common_model_args(p):
        p.add_argument("--capacity", type=int, nargs=2, metavar=("LO", "HI"))
        p.add_argument("--no-facilitator", action="store_true")
        p.add_argument("--params", help="JSON file of model parameter overrides")

    solve = sub.add_parser("solve", help="optimize a grouping")
    solve.add_argument("--network", required=True)
    solve.add_argument("--algo", default="lns",
                       choices=["exact", "lns", "local", "random", "network", "even"])
    solve.add_argument("--seed", type=int, default=0)
    solve.add_argument("--restarts", type=int, default=50)
    solve.add_argument("--stall-limit", type=int, default=200)
    solve.add_argument("--destroy-size", type=int, default=2)
    solve.add_argument("--time-limit", type=float)
    solve.add_argument("--exact-limit", type=int, default=12)
    solve.add_argument("--constraints", help="JSON file of pins and link constraints")
    solve.add_argument("--out", help="write the result document here")
    common_model_args(solve)

    ev = sub.add_parser("evaluate", help="score an existing grouping")
    ev.add_argument("--network", required=True)
    ev.add_argument("--partition", required=True)
    ev.add_argument("--out")
    common_model_args(ev)

    sim = sub.add_parser("simulate", help="Monte Carlo check of the closed form")
    sim.add_argument("--network", required=True)
    sim.add_argument("--partition", required=True)
    sim.add_argument("--samples", type=int, default=100_000)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--out")
    common_model_args(sim)

    exp = sub.add_parser("export-milp", help="write solver-interchange files")
    exp.add_argument("--network", required=True)
    exp.add_argument("--s", type=int, help="a single group count (default: all feasible)")
    exp.add_argument("--out-dir", required=True)
    exp.add_argument("--instance-name", help="file-name stem (default: network file stem)")
    exp.add_argument("--mps", action="store_true")
    common_model_args(exp)

    bench = sub.add_parser("benchmark", help="run the comparison sweeps")
    bench.add_argument("--config", required=True)
    bench.add_argument("--out-dir", required=True)

    serve = sub.add_parser("serve", help="start the local HTTP API")
    serve.add_argument("--data-dir", default=os.environ.get("PEERPLAN_DATA_DIR", "./peerplan-data"))
    serve.add_argument("--host", default=os.environ.get("PEERPLAN_HOST", "127.0.0.1"))
    serve.add_argument("--port", type=int, default=int(os.environ.get("PEERPLAN_PORT", "8000")))
    serve.add_argument("--seed", type=int, default=int(os.environ.get("PEERPLAN_SEED", "0")))
    serve.add_argument("--workers", type=int, default=int(os.environ.get("PEERPLAN_WORKERS", "1")))
    serve.add_argument("--allow-origin", action="append", default=None, metavar="ORIGIN",
                       help="origin allowed to call the API cross-site (repeatable)")

    return parser


def _params_from_args(args) -> ModelParams:
    params = ModelParams()
    if args.params:
        params = fileio.params_from_obj(fileio.read_json(args.params), base=params)
    if args.capacity:
        params = dataclasses.replace(params, capacity=CapacityBounds(*args.capacity))
    if args.no_facilitator:
        params = dataclasses.replace(params, include_facilitator=False)
    return params


def _print_partition(net: SocialNetwork, result: SolveResult) -> None:
    behavior = net.behavior_of()
    print(f"algorithm: {result.algorithm}")
    for index, members in enumerate(result.partition.groups()):
        labeled = ", ".join(
            f"{m}({'U' if behavior[m].is_user else 'N'})" for m in members)
        print(f"  group {index}: {labeled}")
    evaluation = result.evaluation
    print(f"expected non-users: {evaluation.expected_nonusers:.6f}")
    print(f"success score: {evaluation.success:.6f}")
    if evaluation.success < 0:
        print("warning: grouping is worse than leaving users alone (deviancy risk)")


def _cmd_generate(args) -> int:
    edges = generate_ws(WsParams(n=args.n, k=args.k, p=args.p, seed=args.seed))
    net = decorate(edges, DecorationParams(
        user_ratio=args.user_ratio, strong_ratio=args.strong_ratio,
        reciprocity=args.reciprocity, seed=args.seed))
    fileio.write_json(args.out, fileio.network_to_obj(net))
    print(f"wrote {args.out}: {len(net.nodes)} nodes "
          f"({net.user_count()} users), {len(net.arcs)} ties")
    return 0


def _cmd_solve(args) -> int:
    net = fileio.read_network_file(args.network)
    params = _params_from_args(args)
    constraints = SolveConstraints()
    if args.constraints:
        constraints = fileio.read_constraints_file(args.constraints)
    if args.algo in ("random", "network", "even"):
        if not constraints.is_empty():
            raise BadInputFile(f"algo {args.algo!r} does not support constraints")
        baseline = {"random": baseline_random, "network": baseline_network,
                    "even": baseline_even_users}[args.algo]
        partition = baseline(net, params, seed=args.seed)
        result = SolveResult(
            partition=partition,
            evaluation=evaluate_partition(net, partition, params),
            algorithm=args.algo, wall_time=0.0, restarts_completed=1,
            improvement_trace=[])
    elif args.algo == "exact":
        result = solve_exact(net, params, constraints, exact_limit=args.exact_limit)
    else:
        config = LnsConfig(restarts=args.restarts, stall_limit=args.stall_limit,
                           destroy_size=args.destroy_size,
                           time_limit=args.time_limit, seed=args.seed)
        runner = solve_lns if args.algo == "lns" else solve_local_search
        result = runner(net, params, config, constraints)
    _print_partition(net, result)
    if args.out:
        fileio.write_json(args.out, fileio.solve_result_to_obj(result))
        print(f"wrote {args.out}")
    return 0


def _cmd_evaluate(args) -> int:
    net = fileio.read_network_file(args.network)
    partition = fileio.read_partition_file(args.partition)
    params = _params_from_args(args)
    evaluation = evaluate_partition(net, partition, params)
    print(f"expected non-users: {evaluation.expected_nonusers:.6f}")
    print(f"success score: {evaluation.success:.6f}")
    for node_id, risk in sorted(evaluation.flips.items()):
        print(f"  {node_id}: P(become user)={risk.become_user:.4f} "
              f"P(become non-user)={risk.become_nonuser:.4f}")
    if evaluation.success < 0:
        print("warning: grouping is worse than leaving users alone (deviancy risk)")
    if args.out:
        fileio.write_json(args.out, fileio.evaluation_to_obj(evaluation))
        print(f"wrote {args.out}")
    return 0


def _cmd_simulate(args) -> int:
    net = fileio.read_network_file(args.network)
    partition = fileio.read_partition_file(args.partition)
    params = _params_from_args(args)
    weighted = apply_intervention(net, partition, params)
    closed = expected_nonusers(weighted, params)
    outcome = simulate(weighted, params, sample_count=args.samples, seed=args.seed)
    gap = abs(outcome.mean - closed)
    bar = 4.0 * outcome.std_error
    print(f"closed form:  {closed:.6f}")
    print(f"simulated:    {outcome.mean:.6f} +/- {outcome.std_error:.6f} "
          f"({outcome.sample_count} samples)")
    print(f"|difference|: {gap:.6f} ({'within' if gap <= bar else 'OUTSIDE'} 4 standard errors)")
    if args.out:
        fileio.write_json(args.out, {
            "closed_form": closed, "mean": outcome.mean,
            "std_error": outcome.std_error, "sample_count": outcome.sample_count,
            "clamp_events": outcome.clamp_events})
        print(f"wrote {args.out}")
    return 0


def _cmd_export_milp(args) -> int:
    net = fileio.read_network_file(args.network)
    params = _params_from_args(args)
    name = args.instance_name or Path(args.network).stem
    s_values = [args.s] if args.s is not None else None
    written = export_instance(net, params, args.out_dir, name,
                              s_values=s_values, mps=args.mps)
    for path in written:
        print(f"wrote {path}")
    return 0


def _cmd_benchmark(args) -> int:
    config = benchmark_mod.load_config(args.config)
    report = benchmark_mod.run_benchmark(config)
    written = benchmark_mod.write_report(report, args.out_dir)
    for algo, stats in report.aggregates["per_algorithm"].items():
        print(f"{algo:>8}: mean success {stats['mean_success']:+.4f} "
              f"over {stats['runs']} runs")
    for path in written:
        print(f"wrote {path}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    if args.workers > 1:
        os.environ["PEERPLAN_DATA_DIR"] = str(args.data_dir)
        os.environ["PEERPLAN_SEED"] = str(args.seed)
        os.environ["PEERPLAN_ALLOW_ORIGINS"] = ",".join(args.allow_origin or [])
        uvicorn.run("peerplan.service:app_from_env", factory=True,
                    host=args.host, port=args.port, workers=args.workers)
    else:
        from .service import create_app
        uvicorn.run(create_app(args.data_dir, default_seed=args.seed,
                               allow_origins=args.allow_origin),
                    host=args.host, port=args.port)
    return 0


_COMMANDS = {
    "generate": _cmd_generate,
    "solve": _cmd_solve,
    "evaluate": _cmd_evaluate,
    "simulate": _cmd_simulate,
    "export-milp": _cmd_export_milp,
    "benchmark": _cmd_benchmark,
    "serve": _cmd_serve,
}

_EXIT_INFEASIBLE = 2
_EXIT_BAD_INPUT = 3
_EXIT_CONFLICT = 4


def _fail(code: int, tag: str, message: str) -> int:
    print(json.dumps({"code": tag, "message": message}), file=sys.stderr)
    return code


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        return _fail(1, "usage", str(exc))
    except BadInputFile as exc:
        return _fail(_EXIT_BAD_INPUT, "bad_input", str(exc))
    except UnsatisfiableConstraints as exc:
        return _fail(_EXIT_CONFLICT, "unsatisfiable_constraints", str(exc))
    except (InfeasibleBounds, InstanceTooLarge, NoFeasibleSplit,
            InfeasiblePartition, InfeasibleS, BadDegree) as exc:
        return _fail(_EXIT_INFEASIBLE, "infeasible", str(exc))
    except SinkUnwritable as exc:
        return _fail(1, "sink_unwritable", str(exc))
    except (PeerplanError, ValueError) as exc:
        return _fail(1, "error", str(exc))


if __name__ == "__main__":
    sys.exit(main())
