"""Benchmark harness: algorithm comparisons over seeded instance sweeps.

Local search always runs after LNS on the same instance because its time
budget is the LNS wall time just measured (the equal-compute comparison rule).
Every row is traceable: instance_seed alone reproduces the network.
"""

from __future__ import annotations

import csv
import dataclasses
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .model import ModelParams, SocialNetwork
from .generate import DecorationParams, WsParams, decorate, generate_ws
from .solvers import (
    LnsConfig,
    baseline_even_users,
    baseline_network,
    baseline_random,
    evaluate_partition,
    solve_exact,
    solve_lns,
    solve_local_search,
)
from .fileio import BadInputFile, dump_json, params_from_obj, params_to_obj

CSV_HEADER = ("algo", "instance_seed", "n", "success", "expected_nonusers", "wall_ms")
KNOWN_ALGORITHMS = ("lns", "local", "exact", "random", "network", "even")


@dataclass(frozen=True)
class BenchmarkConfig:
    ns: tuple[int, ...] = (30, 40, 50, 60)
    count: int = 25
    seed: int = 0
    k: int = 4
    p: float = 0.25
    user_ratio: float = 0.68
    strong_ratio: float = 0.5
    reciprocity: float = 1.0
    params: ModelParams = field(default_factory=ModelParams)
    algorithms: tuple[str, ...] = ("lns", "local", "random", "network", "even")
    restarts: int = 50
    stall_limit: int = 200
    exact_limit: int = 12
    omega_ns: tuple[int, ...] = (12,)
    omega_values: tuple[float, ...] = (0.25, 0.5, 0.75, 1.0)
    omega_count: int = 5
    scaling_ns: tuple[int, ...] = (20, 40, 60)
    scaling_count: int = 5
    figures: tuple[str, ...] = ("comparison", "small_vs_large", "omega_ratio", "scaling")


@dataclass(frozen=True)
class Row:
    algo: str
    instance_seed: int
    n: int
    success: float
    expected_nonusers: float
    wall_ms: float


@dataclass
class BenchmarkReport:
    config_echo: dict
    rows: list[Row]
    omega_rows: list[tuple[float, Row]]
    scaling_rows: list[Row]
    aggregates: dict


def load_config(path: str | Path) -> BenchmarkConfig:
    try:
        with open(path, "rb") as handle:
            raw = tomllib.load(handle)
    except OSError as exc:
        raise BadInputFile(f"cannot read {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise BadInputFile(f"{path} is not valid TOML: {exc}") from exc
    return config_from_obj(raw)


def config_from_obj(raw: dict) -> BenchmarkConfig:
    known_sections = {"instances", "params", "run", "figures"}
    unknown = set(raw) - known_sections
    if unknown:
        raise BadInputFile(f"unknown config sections {sorted(unknown)}")

    def section(name: str, allowed: set[str]) -> dict:
        body = raw.get(name, {})
        if not isinstance(body, dict):
            raise BadInputFile(f"[{name}] must be a table")
        extra = set(body) - allowed
        if extra:
            raise BadInputFile(f"[{name}] has unknown keys {sorted(extra)}")
        return body

    inst = section("instances", {"ns", "count", "seed", "k", "p", "user_ratio",
                                 "strong_ratio", "reciprocity"})
    run = section("run", {"algorithms", "restarts", "stall_limit", "exact_limit"})
    figures = section("figures", {"enable", "omega_ns", "omega_values",
                                  "omega_count", "scaling_ns", "scaling_count"})
    params = params_from_obj(raw.get("params", {}))
    defaults = BenchmarkConfig()
    config = BenchmarkConfig(
        ns=tuple(inst.get("ns", defaults.ns)),
        count=inst.get("count", defaults.count),
        seed=inst.get("seed", defaults.seed),
        k=inst.get("k", defaults.k),
        p=inst.get("p", defaults.p),
        user_ratio=inst.get("user_ratio", defaults.user_ratio),
        strong_ratio=inst.get("strong_ratio", defaults.strong_ratio),
        reciprocity=inst.get("reciprocity", defaults.reciprocity),
        params=params,
        algorithms=tuple(run.get("algorithms", defaults.algorithms)),
        restarts=run.get("restarts", defaults.restarts),
        stall_limit=run.get("stall_limit", defaults.stall_limit),
        exact_limit=run.get("exact_limit", defaults.exact_limit),
        omega_ns=tuple(figures.get("omega_ns", defaults.omega_ns)),
        omega_values=tuple(figures.get("omega_values", defaults.omega_values)),
        omega_count=figures.get("omega_count", defaults.omega_count),
        scaling_ns=tuple(figures.get("scaling_ns", defaults.scaling_ns)),
        scaling_count=figures.get("scaling_count", defaults.scaling_count),
        figures=tuple(figures.get("enable", defaults.figures)),
    )
    bad = [a for a in config.algorithms if a not in KNOWN_ALGORITHMS]
    if bad:
        raise BadInputFile(f"unknown algorithms {bad}")
    if config.count < 1 or not config.ns:
        raise BadInputFile("need at least one size and one instance")
    return config


def instance_seed(config_seed: int, n: int, index: int) -> int:
    """Readable composite seed so any row traces back to its instance."""
    return config_seed * 1_000_000 + n * 1_000 + index


def make_instance(config: BenchmarkConfig, n: int, index: int) -> tuple[int, SocialNetwork]:
    seed = instance_seed(config.seed, n, index)
    edges = generate_ws(WsParams(n=n, k=config.k, p=config.p, seed=seed))
    net = decorate(edges, DecorationParams(
        user_ratio=config.user_ratio, strong_ratio=config.strong_ratio,
        reciprocity=config.reciprocity, seed=seed))
    return seed, net


_BASELINES = {
    "random": baseline_random,
    "network": baseline_network,
    "even": baseline_even_users,
}


def _row(algo: str, seed: int, n: int, success: float, expected: float,
         wall_seconds: float) -> Row:
    if math.isnan(success) or math.isnan(expected):
        raise AssertionError(f"NaN from {algo} on seed {seed}")
    return Row(algo, seed, n, success, expected, wall_seconds * 1000.0)


def run_instance(config: BenchmarkConfig, net: SocialNetwork, seed: int) -> list[Row]:
    """All configured algorithms on one instance, honoring time parity."""
    n = len(net.nodes)
    rows: list[Row] = []
    lns_wall: float | None = None
    order = sorted(config.algorithms, key=lambda a: 0 if a == "lns" else 1)
    for algo in order:
        if algo == "lns":
            result = solve_lns(net, config.params, LnsConfig(
                restarts=config.restarts, stall_limit=config.stall_limit, seed=seed))
            lns_wall = result.wall_time
        elif algo == "local":
            budget = lns_wall if lns_wall is not None else None
            result = solve_local_search(net, config.params, LnsConfig(
                restarts=config.restarts if budget is None else max(config.restarts, 100_000),
                stall_limit=config.stall_limit, seed=seed, time_limit=budget))
        elif algo == "exact":
            result = solve_exact(net, config.params, exact_limit=config.exact_limit)
        else:
            start = time.perf_counter()
            partition = _BASELINES[algo](net, config.params, seed=seed)
            evaluation = evaluate_partition(net, partition, config.params)
            rows.append(_row(algo, seed, n, evaluation.success,
                             evaluation.expected_nonusers, time.perf_counter() - start))
            continue
        rows.append(_row(algo, seed, n, result.evaluation.success,
                         result.evaluation.expected_nonusers, result.wall_time))
    by_name = {a: i for i, a in enumerate(config.algorithms)}
    rows.sort(key=lambda r: by_name[r.algo])
    return rows


def run_benchmark(config: BenchmarkConfig) -> BenchmarkReport:
    rows: list[Row] = []
    for n in config.ns:
        for index in range(config.count):
            seed, net = make_instance(config, n, index)
            rows.extend(run_instance(config, net, seed))

    omega_rows: list[tuple[float, Row]] = []
    if "omega_ratio" in config.figures:
        for n in config.omega_ns:
            for index in range(config.omega_count):
                seed, net = make_instance(config, n, index)
                for omega in config.omega_values:
                    params = dataclasses.replace(config.params, flip_to_user=omega)
                    if n <= config.exact_limit:
                        result = solve_exact(net, params, exact_limit=config.exact_limit)
                    else:
                        result = solve_lns(net, params, LnsConfig(
                            restarts=config.restarts, stall_limit=config.stall_limit,
                            seed=seed))
                    omega_rows.append((omega, _row(
                        result.algorithm, seed, n, result.evaluation.success,
                        result.evaluation.expected_nonusers, result.wall_time)))

    scaling_rows: list[Row] = []
    if "scaling" in config.figures:
        for n in config.scaling_ns:
            for index in range(config.scaling_count):
                seed, net = make_instance(config, n, index)
                result = solve_lns(net, config.params, LnsConfig(
                    restarts=1, stall_limit=config.stall_limit, seed=seed))
                scaling_rows.append(_row("lns_single_restart", seed, n,
                                         result.evaluation.success,
                                         result.evaluation.expected_nonusers,
                                         result.wall_time))

    return BenchmarkReport(
        config_echo=_config_echo(config),
        rows=rows,
        omega_rows=omega_rows,
        scaling_rows=scaling_rows,
        aggregates=_aggregate(rows, scaling_rows),
    )


def _config_echo(config: BenchmarkConfig) -> dict:
    echo = dataclasses.asdict(config)
    echo["params"] = params_to_obj(config.params)
    return echo


def _aggregate(rows: list[Row], scaling_rows: list[Row]) -> dict:
    per_algo: dict[str, dict] = {}
    algos = sorted({r.algo for r in rows})
    for algo in algos:
        success = np.array([r.success for r in rows if r.algo == algo])
        expected = np.array([r.expected_nonusers for r in rows if r.algo == algo])
        per_algo[algo] = {
            "runs": int(success.size),
            "mean_success": float(success.mean()),
            "std_success": float(success.std(ddof=1)) if success.size > 1 else 0.0,
            "mean_expected_nonusers": float(expected.mean()),
        }
    per_algo_n: dict[str, dict] = {}
    for algo in algos:
        for n in sorted({r.n for r in rows if r.algo == algo}):
            success = np.array([r.success for r in rows if r.algo == algo and r.n == n])
            per_algo_n[f"{algo}@{n}"] = {
                "runs": int(success.size),
                "mean_success": float(success.mean()),
                "std_success": float(success.std(ddof=1)) if success.size > 1 else 0.0,
            }
    scaling: dict[str, float] = {}
    for n in sorted({r.n for r in scaling_rows}):
        walls = [r.wall_ms for r in scaling_rows if r.n == n]
        scaling[str(n)] = float(np.median(walls))
    return {
        "per_algorithm": per_algo,
        "per_algorithm_n": per_algo_n,
        "median_single_restart_ms": scaling,
    }


# ---------------------------------------------------------------------------
# Artifacts


def _write_rows(path: Path, rows: list[Row], extra: str | None = None,
                extra_values: list[float] | None = None) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        header = (extra, *CSV_HEADER) if extra else CSV_HEADER
        writer.writerow(header)
        for k, row in enumerate(rows):
            cells = [row.algo, row.instance_seed, row.n,
                     f"{row.success:.12g}", f"{row.expected_nonusers:.12g}",
                     f"{row.wall_ms:.6g}"]
            if extra:
                cells.insert(0, f"{extra_values[k]:.12g}")
            writer.writerow(cells)


def write_report(report: BenchmarkReport, out_dir: str | Path) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    figures = report.config_echo.get("figures", ())

    path = out_dir / "comparison.csv"
    _write_rows(path, report.rows)
    written.append(path)

    if "small_vs_large" in figures:
        path = out_dir / "small_vs_large.csv"
        _write_rows(path, [r for r in report.rows if r.algo in ("lns", "local")])
        written.append(path)

    if report.omega_rows:
        path = out_dir / "omega_ratio.csv"
        _write_rows(path, [r for _, r in report.omega_rows], extra="flip_to_user",
                    extra_values=[om for om, _ in report.omega_rows])
        written.append(path)

    if report.scaling_rows:
        path = out_dir / "scaling.csv"
        _write_rows(path, report.scaling_rows)
        written.append(path)

    path = out_dir / "report.json"
    path.write_text(dump_json({
        "config": report.config_echo,
        "aggregates": report.aggregates,
        "row_count": len(report.rows),
    }))
    written.append(path)
    return written
