"""Local HTTP API over the roster store and solvers.

Single-tenant and local-first: no auth, loopback binding by default. Errors
use one shape everywhere: {"code", "message", "details"}.
"""

from __future__ import annotations

import os
import time
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response

from .model import InfeasiblePartition, SocialNetwork
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
from .store import ConflictingUpdate, NotFound, RosterStore
from . import fileio
from .fileio import BadInputFile

BASELINES = {
    "random": baseline_random,
    "network": baseline_network,
    "even": baseline_even_users,
}
ALGORITHMS = ("exact", "lns", "local", "random", "network", "even")


def _error(status: int, code: str, message: str, details: dict | None = None) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"code": code, "message": message, "details": details or {}},
    )


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise BadInputFile(message)


def _opt_int(payload: dict, key: str, default: int | None) -> int | None:
    value = payload.get(key, default)
    _require(value is None or (isinstance(value, int) and not isinstance(value, bool)),
             f"{key} must be an integer")
    return value


def _without_nodes(net: SocialNetwork, absent: set[str]) -> SocialNetwork:
    nodes = tuple(n for n in net.nodes if n.id not in absent)
    arcs = tuple(a for a in net.arcs if a.src not in absent and a.dst not in absent)
    return SocialNetwork(nodes=nodes, arcs=arcs)


def create_app(data_dir: str | Path, default_seed: int = 0,
               max_bytes: int | None = None,
               allow_origins: list[str] | None = None) -> FastAPI:
    app = FastAPI(title="peerplan", docs_url=None, redoc_url=None)
    store = RosterStore(data_dir, max_bytes=max_bytes)
    app.state.store = store
    app.state.default_seed = default_seed
    if allow_origins:
        # Off unless asked: browser clients served from another origin need
        # it, curl and same-origin pages do not.
        app.add_middleware(CORSMiddleware, allow_origins=allow_origins,
                           allow_methods=["*"], allow_headers=["*"])

    @app.exception_handler(NotFound)
    async def _not_found(request: Request, exc: NotFound):
        return _error(404, "not_found", str(exc))

    @app.exception_handler(ConflictingUpdate)
    async def _conflict(request: Request, exc: ConflictingUpdate):
        return _error(409, "conflict", str(exc))

    @app.exception_handler(UnsatisfiableConstraints)
    async def _unsat(request: Request, exc: UnsatisfiableConstraints):
        return _error(409, "unsatisfiable_constraints", str(exc))

    @app.exception_handler(BadInputFile)
    async def _bad_input(request: Request, exc: BadInputFile):
        return _error(422, "bad_input", str(exc))

    for infeasible in (InfeasibleBounds, InstanceTooLarge, NoFeasibleSplit, InfeasiblePartition):
        @app.exception_handler(infeasible)
        async def _infeasible(request: Request, exc: Exception):
            return _error(422, "infeasible", str(exc))

    @app.exception_handler(RequestValidationError)
    async def _malformed(request: Request, exc: RequestValidationError):
        return _error(422, "bad_input", "malformed request body")

    @app.exception_handler(ValueError)
    async def _bad_value(request: Request, exc: ValueError):
        return _error(422, "bad_request", str(exc))

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.post("/rosters", status_code=201)
    def create_roster(payload: dict):
        _require(isinstance(payload.get("name"), str) and payload["name"], "name must be a non-empty string")
        _require("network" in payload, "network is required")
        network = fileio.network_from_obj(payload["network"])
        roster = store.create(payload["name"], network)
        return RosterStore._roster_to_obj(roster)

    @app.get("/rosters")
    def list_rosters():
        return {"rosters": store.list_rosters()}

    @app.get("/rosters/{roster_id}")
    def get_roster(roster_id: str):
        return RosterStore._roster_to_obj(store.get(roster_id))

    @app.put("/rosters/{roster_id}")
    def update_roster(roster_id: str, payload: dict):
        _require(isinstance(payload.get("version"), int), "version is required for updates")
        name = payload.get("name")
        if name is not None:
            _require(isinstance(name, str) and name, "name must be a non-empty string")
        network = None
        if "network" in payload:
            network = fileio.network_from_obj(payload["network"])
        roster = store.update(roster_id, payload["version"], name=name, network=network)
        return RosterStore._roster_to_obj(roster)

    @app.delete("/rosters/{roster_id}", status_code=204)
    def delete_roster(roster_id: str):
        store.delete(roster_id)
        return Response(status_code=204)

    @app.post("/rosters/{roster_id}/solve")
    def solve_roster(roster_id: str, payload: dict):
        roster = store.get(roster_id)
        result, constraints = _run_solve(app, roster.network, payload, roster=roster)
        updated, result_id = store.add_result(roster_id, result, constraints)
        body = fileio.solve_result_to_obj(result)
        body["result_id"] = result_id
        body["roster_version"] = updated.version
        body["deviancy_warning"] = result.evaluation.success < 0
        return body

    @app.post("/rosters/{roster_id}/evaluate")
    def evaluate_roster(roster_id: str, payload: dict):
        roster = store.get(roster_id)
        _require("partition" in payload, "partition is required")
        partition = fileio.partition_from_obj(payload["partition"])
        params = fileio.params_from_obj(payload.get("params", {}))
        evaluation = evaluate_partition(roster.network, partition, params)
        body = fileio.evaluation_to_obj(evaluation)
        body["deviancy_warning"] = evaluation.success < 0
        return body

    @app.get("/rosters/{roster_id}/results/{result_id}")
    def get_result(roster_id: str, result_id: str):
        doc = store.get_result(roster_id, result_id)
        doc["deviancy_warning"] = doc["result"]["evaluation"]["success"] < 0
        return doc

    return app


def _run_solve(app: FastAPI, network: SocialNetwork, payload: dict,
               roster=None) -> tuple[SolveResult, SolveConstraints]:
    """Shared solve flow: absent handling, constraint prep, algorithm dispatch."""
    store: RosterStore = app.state.store
    algo = payload.get("algo", "lns")
    _require(algo in ALGORITHMS, f"algo must be one of {', '.join(ALGORITHMS)}")
    seed = payload.get("seed", app.state.default_seed)
    _require(isinstance(seed, int) and not isinstance(seed, bool), "seed must be an integer")
    params = fileio.params_from_obj(payload.get("params", {}))
    constraints = fileio.constraints_from_obj(payload.get("constraints", {}))

    absent = payload.get("absent", [])
    _require(isinstance(absent, list) and all(isinstance(x, str) for x in absent),
             "absent must be a list of node ids")
    known = network.node_ids()
    missing = [x for x in absent if x not in known]
    _require(not missing, f"absent nodes not in roster: {missing}")
    working = _without_nodes(network, set(absent)) if absent else network

    # A no-show defaults to the minimal-disruption re-solve: everyone still
    # present keeps the seat from the latest stored result unless the caller
    # pinned them elsewhere or asked for full re-optimization.
    if absent and not payload.get("reoptimize", False) and roster is not None and roster.history:
        last = roster.history[-1]
        doc = store.get_result(roster.id, last.result_id)
        assignment = doc["result"]["partition"]["assignment"]
        pinned = dict(constraints.pinned)
        for node_id, group in assignment.items():
            if node_id not in absent and node_id not in pinned:
                pinned[node_id] = group
        constraints = SolveConstraints(
            pinned=pinned,
            must_link=constraints.must_link,
            cannot_link=constraints.cannot_link,
            frozen_groups=constraints.frozen_groups,
        )

    if algo in BASELINES:
        _require(constraints.is_empty(),
                 f"algo {algo!r} does not support constraints or absences")
        start = time.perf_counter()
        partition = BASELINES[algo](working, params, seed=seed)
        evaluation = evaluate_partition(working, partition, params)
        result = SolveResult(
            partition=partition, evaluation=evaluation, algorithm=algo,
            wall_time=time.perf_counter() - start, restarts_completed=1,
            improvement_trace=[],
        )
    elif algo == "exact":
        result = solve_exact(working, params, constraints,
                             exact_limit=_opt_int(payload, "exact_limit", 12))
    else:
        time_limit = payload.get("time_limit")
        _require(time_limit is None or (isinstance(time_limit, (int, float))
                                        and not isinstance(time_limit, bool)),
                 "time_limit must be a number")
        config = LnsConfig(
            restarts=_opt_int(payload, "restarts", 50),
            stall_limit=_opt_int(payload, "stall_limit", 200),
            destroy_size=_opt_int(payload, "destroy_size", 2),
            time_limit=time_limit,
            seed=seed,
        )
        runner = solve_lns if algo == "lns" else solve_local_search
        result = runner(working, params, config, constraints)
    return result, constraints


def app_from_env() -> FastAPI:
    """Factory for uvicorn workers; configuration rides on environment variables."""
    data_dir = os.environ.get("PEERPLAN_DATA_DIR", "./peerplan-data")
    seed = int(os.environ.get("PEERPLAN_SEED", "0"))
    origins = [o for o in os.environ.get("PEERPLAN_ALLOW_ORIGINS", "").split(",") if o]
    return create_app(data_dir, default_seed=seed, allow_origins=origins or None)
