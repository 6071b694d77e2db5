"""Command-line runner: single experiments, the ten-configuration grid,
and trace replay.

Every economic constant can also be overridden through GRIDECON_*
environment variables; ``--help`` lists the recognised names. Output
files per episode are ``trace_NNN.jsonl`` and ``metrics_NNN.csv``, plus
one ``summary.json`` per run directory.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .config import (
    ConfigurationError,
    EconomyConfig,
    apply_env_overrides,
    config_as_dict,
    env_override_names,
    governing_from_names,
)
from .env import Simulation
from .governance import GoverningSystem, Institution, PlannerReward
from .policy import (
    AGENT_POLICY_NAMES,
    PLANNER_POLICY_NAMES,
    make_agent_policy,
    make_planner_policy,
)
from .trace import (
    TraceParseError,
    TraceWriter,
    build_summary,
    metrics_to_csv,
    read_trace,
    replay_metrics,
    write_metrics,
    write_summary,
)

SYSTEM_CHOICES = tuple(s.value for s in GoverningSystem)
INSTITUTION_CHOICES = tuple(i.value for i in Institution)
REWARD_CHOICES = tuple(r.value for r in PlannerReward)


def build_parser() -> argparse.ArgumentParser:
    overrides = "\n".join(f"  {name}" for name in env_override_names())
    parser = argparse.ArgumentParser(
        prog="gridecon",
        description="Run gather-trade-build economy episodes.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=(
            "environment variable overrides (one per economic constant):\n"
            + overrides
        ),
    )
    parser.add_argument("--system", choices=SYSTEM_CHOICES,
                        default=GoverningSystem.SEMI_LIBERTARIAN_UTILITARIAN.value)
    parser.add_argument("--institution", choices=INSTITUTION_CHOICES,
                        default=Institution.INCLUSIVE.value)
    parser.add_argument("--reward", choices=REWARD_CHOICES,
                        default=PlannerReward.EQ_TIMES_PROD.value)
    parser.add_argument("--planner-policy", choices=PLANNER_POLICY_NAMES,
                        default="flat10")
    parser.add_argument("--agent-policy", choices=AGENT_POLICY_NAMES,
                        default="heuristic")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--episodes", type=int, default=1)
    parser.add_argument("--steps", type=int, default=1000,
                        help="steps per episode; must cover whole tax periods")
    parser.add_argument("--out", type=Path, default=Path("runs/run"),
                        help="output directory for traces, metrics, summary")
    parser.add_argument("--grid", action="store_true",
                        help="run the full system x institution x reward grid")
    parser.add_argument("--replay", type=Path, metavar="TRACE",
                        help="recompute metrics from a trace and verify them")
    return parser


def _make_config(args, system, institution, reward) -> EconomyConfig:
    governing = governing_from_names(system, institution, reward)
    config = EconomyConfig(governing=governing, episode_steps=args.steps)
    config = apply_env_overrides(config)
    config.validate()
    return config


def run_episode(
    config: EconomyConfig,
    seed: int,
    agent_policy: str,
    planner_policy: str,
    trace_path: Path,
    metrics_path: Path,
) -> dict:
    """Run one episode, stream its trace, and return its summary dict."""
    sim = Simulation(config, seed)
    observations = sim.reset()
    writer = TraceWriter(
        trace_path,
        {"config": config_as_dict(config), "seed": seed},
    )
    policies = [
        make_agent_policy(agent_policy, sim.agents[i].is_expert)
        for i in range(config.n_agents)
    ]
    planner = make_planner_policy(planner_policy)
    agent_rngs = [
        np.random.default_rng([seed, i, 0xAC])
        for i in range(config.n_agents)
    ]
    planner_rng = np.random.default_rng([seed, 0xBD])
    done = False
    try:
        while not done:
            actions = [
                policies[i].decide(
                    observations.agent[i], sim.agent_mask(i), agent_rngs[i]
                )
                for i in range(config.n_agents)
            ]
            batch = planner.decide(
                observations.planner, sim.planner_mask(), planner_rng
            )
            observations, rewards, events, done = sim.step(actions, batch)
            for event in events:
                writer.write_event(event)
    finally:
        digest = writer.close()
    write_metrics(metrics_path, sim.period_records)
    return build_summary(sim.period_records, digest)


def run_experiment(args, config: EconomyConfig, out_dir: Path) -> dict:
    """Run ``args.episodes`` episodes of one configuration into ``out_dir``."""
    out_dir.mkdir(parents=True, exist_ok=True)
    episode_summaries = []
    for episode in range(args.episodes):
        seed = args.seed + episode
        trace_path = out_dir / f"trace_{episode:03d}.jsonl"
        metrics_path = out_dir / f"metrics_{episode:03d}.csv"
        episode_summaries.append(
            run_episode(
                config,
                seed,
                args.agent_policy,
                args.planner_policy,
                trace_path,
                metrics_path,
            )
        )
    run_summary = {
        "config": config_as_dict(config),
        "base_seed": args.seed,
        "agent_policy": args.agent_policy,
        "planner_policy": args.planner_policy,
        "episodes": episode_summaries,
    }
    write_summary(out_dir / "summary.json", run_summary)
    return run_summary


def grid_configurations():
    """The ten (system, institution, reward) runs of the standard grid."""
    inclusive = Institution.INCLUSIVE.value
    rewards = REWARD_CHOICES
    runs = []
    for reward in rewards:
        runs.append((GoverningSystem.FULL_LIBERTARIAN.value, inclusive, reward))
    for institution in INSTITUTION_CHOICES:
        for reward in rewards:
            runs.append(
                (
                    GoverningSystem.SEMI_LIBERTARIAN_UTILITARIAN.value,
                    institution,
                    reward,
                )
            )
    for reward in rewards:
        runs.append((GoverningSystem.FULL_UTILITARIAN.value, inclusive, reward))
    return runs


def run_grid(args) -> int:
    failures = 0
    for system, institution, reward in grid_configurations():
        config = _make_config(args, system, institution, reward)
        name = f"{system}_{institution}_{reward}"
        try:
            run_experiment(args, config, args.out / name)
        except OSError as exc:
            print(f"{name}: failed: {exc}", file=sys.stderr)
            failures += 1
            continue
        print(f"{name}: done")
    return 1 if failures else 0


def run_replay(trace_path: Path) -> int:
    header, events, digest = read_trace(trace_path)
    records = replay_metrics(header, events)
    rebuilt = metrics_to_csv(records)
    metrics_path = trace_path.with_name(
        trace_path.name.replace("trace", "metrics")
    ).with_suffix(".csv")
    if metrics_path.exists():
        original = metrics_path.read_text()
        if original == rebuilt:
            print(f"replay: {len(records)} periods, metrics match {metrics_path.name}")
            return 0
        print("replay: metrics mismatch against " + str(metrics_path),
              file=sys.stderr)
        return 1
    sys.stdout.write(rebuilt)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.replay is not None:
            return run_replay(args.replay)
        if args.grid:
            return run_grid(args)
        config = _make_config(args, args.system, args.institution, args.reward)
        summary = run_experiment(args, config, args.out)
        final = summary["episodes"][-1]["final"]
        if final is not None:
            print(
                "equality {equality:.4f}  productivity {productivity:.2f}  "
                "maximin {maximin:.2f}  swf {swf:.4f}".format(**final)
            )
        return 0
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except TraceParseError as exc:
        print(f"trace error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
