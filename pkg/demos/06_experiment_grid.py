#!/usr/bin/env python3
"""The ten-configuration comparison grid, one episode each.

Writes traces and metrics under grid_out/ and prints the welfare table.
Takes a minute or so; pass a smaller --steps to sample faster.
"""

import argparse
from pathlib import Path

from gridecon.cli import grid_configurations, run_episode
from gridecon.config import EconomyConfig, governing_from_names

parser = argparse.ArgumentParser()
parser.add_argument("--steps", type=int, default=1000)
parser.add_argument("--seed", type=int, default=3)
parser.add_argument("--out", type=Path, default=Path("grid_out"))
args = parser.parse_args()

print(f"{'configuration':<48} {'equality':>8} {'prod':>8} {'swf':>10} {'builds':>6}")
for system, institution, reward in grid_configurations():
    config = EconomyConfig(
        episode_steps=args.steps,
        governing=governing_from_names(system, institution, reward),
    )
    name = f"{system}/{institution}/{reward}"
    directory = args.out / name.replace("/", "_")
    directory.mkdir(parents=True, exist_ok=True)
    summary = run_episode(
        config,
        seed=args.seed,
        agent_policy="heuristic",
        planner_policy="progressive_us",
        trace_path=directory / "trace_000.jsonl",
        metrics_path=directory / "metrics_000.csv",
    )
    final = summary["final"]
    print(
        f"{name:<48} {final['equality']:>8.3f} {final['productivity']:>8.1f}"
        f" {final['swf']:>10.2f} {summary['totals']['builds']:>6}"
    )

print(f"\ntraces and per-period metrics under {args.out}/")
