"""Run a scaled-down benchmark sweep and read the report.

paperlike.toml in this directory holds the full-size configuration for the
command line runner; this script shrinks every dimension so it finishes in
well under a minute.
"""

import json
import tempfile
from pathlib import Path

from peerplan.benchmark import (
    BenchmarkConfig, run_benchmark, write_report,
)

config = BenchmarkConfig(
    ns=(14, 18),
    count=3,
    seed=0,
    algorithms=("lns", "local", "random", "network", "even"),
    restarts=5,
    stall_limit=50,
    omega_ns=(10,),
    omega_count=2,
    scaling_ns=(12, 16),
    scaling_count=2,
)

report = run_benchmark(config)
out = Path(tempfile.mkdtemp())
for path in write_report(report, out):
    print(f"wrote {path.name}")

aggregates = json.loads((out / "report.json").read_text())["aggregates"]
print("\nmean success per strategy:")
for algo, stats in sorted(aggregates["per_algorithm"].items()):
    print(f"  {algo:<8} {stats['mean_success']:+.4f}")

print("\nmedian single-restart milliseconds by n:")
for n, ms in sorted(aggregates["median_single_restart_ms"].items(), key=lambda kv: int(kv[0])):
    print(f"  n={n}: {ms:.1f} ms")

head = (out / "comparison.csv").read_text().splitlines()
print(f"\ncomparison.csv has {len(head) - 1} rows; first two:")
for line in head[:3]:
    print(f"  {line}")
