"""Figure rendering from episode metric and summary files.

Values are read from the files and plotted as-is; nothing is
recomputed, so every plotted number equals its file counterpart
exactly. Run directories are grouped into systems by parsing their
names (system prefix, then institution, then the reward name).
"""

import csv
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

SYSTEMS = (
    "full_libertarian",
    "semi_libertarian_utilitarian",
    "full_utilitarian",
)
INSTITUTIONS = ("inclusive", "arbitrary", "extractive")

RATIO_COLUMNS = ("ratio_build_house", "ratio_build_skill")
WELFARE_COLUMNS = ("equality", "productivity", "maximin", "swf")
ACTIVITY_COLUMNS = ("builds", "house_trades", "skill_trades")
REQUIRED_COLUMNS = RATIO_COLUMNS + WELFARE_COLUMNS + ACTIVITY_COLUMNS


class SchemaError(ValueError):
    """A metrics file is missing columns the figures need."""


def parse_run_name(name: str):
    """Split a run directory name into (system, institution, reward)."""
    for system in SYSTEMS:
        if name.startswith(system + "_"):
            rest = name[len(system) + 1 :]
            for institution in INSTITUTIONS:
                if rest.startswith(institution + "_"):
                    return system, institution, rest[len(institution) + 1 :]
    raise ValueError(f"run name {name!r} does not parse as system_institution_reward")


def load_metrics(path: Path) -> list:
    with open(path) as handle:
        reader = csv.DictReader(handle)
        columns = reader.fieldnames or []
        missing = [c for c in REQUIRED_COLUMNS if c not in columns]
        if missing:
            raise SchemaError(f"{path} lacks columns {missing}")
        rows = []
        for raw in reader:
            row = dict(raw)
            for column in RATIO_COLUMNS + WELFARE_COLUMNS:
                row[column] = float(raw[column])
            for column in ACTIVITY_COLUMNS:
                row[column] = int(raw[column])
            rows.append(row)
    return rows


def load_run(directory: Path) -> dict:
    directory = Path(directory)
    with open(directory / "summary.json") as handle:
        summary = json.load(handle)
    metrics = sorted(directory.glob("metrics_*.csv"))
    if not metrics:
        raise FileNotFoundError(f"no metrics files under {directory}")
    return {
        "name": directory.name,
        "summary": summary,
        "periods": load_metrics(metrics[0]),
    }


def _grouped_bars(axis, runs, column):
    """One bar per run, grouped and colored by governing system."""
    colors = {system: f"C{i}" for i, system in enumerate(SYSTEMS)}
    values = []
    position = 0
    seen_systems = []
    for run in runs:
        system, institution, reward = parse_run_name(run["name"])
        value = run["periods"][-1][column]
        short = f"{institution[:3]}/{reward[:7]}"
        axis.bar(position, value, color=colors[system], label=(
            system if system not in seen_systems else None
        ))
        if system not in seen_systems:
            seen_systems.append(system)
        values.append((run["name"], value))
        axis.annotate(short, (position, 0), rotation=90, fontsize=6,
                      ha="center", va="bottom")
        position += 1
    axis.set_ylabel(column)
    axis.set_xticks([])
    return values


def make_plots(run_directories, out_dir) -> dict:
    """Render ratio bars, welfare bars, and activity scatters.

    Returns {figure_name: {column: [(run_name, value), ...]}} holding
    exactly the values drawn, for comparison against the files.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    runs = [load_run(d) for d in run_directories]
    plotted = {}

    figure, axes = plt.subplots(1, len(RATIO_COLUMNS), figsize=(10, 4))
    plotted["ratio_bars"] = {
        column: _grouped_bars(axis, runs, column)
        for column, axis in zip(RATIO_COLUMNS, axes)
    }
    axes[0].legend(fontsize=6)
    figure.tight_layout()
    figure.savefig(out_dir / "ratio_bars.png", dpi=120)
    plt.close(figure)

    figure, axes = plt.subplots(2, 2, figsize=(10, 7))
    plotted["welfare_bars"] = {
        column: _grouped_bars(axis, runs, column)
        for column, axis in zip(WELFARE_COLUMNS, axes.ravel())
    }
    axes[0, 0].legend(fontsize=6)
    figure.tight_layout()
    figure.savefig(out_dir / "welfare_bars.png", dpi=120)
    plt.close(figure)

    # Per-period activity vs welfare scatter, one subplot per pair.
    figure, axes = plt.subplots(
        len(ACTIVITY_COLUMNS), len(WELFARE_COLUMNS), figsize=(14, 9)
    )
    scatter = {}
    for i, activity in enumerate(ACTIVITY_COLUMNS):
        for j, welfare in enumerate(WELFARE_COLUMNS):
            axis = axes[i, j]
            points = []
            for run in runs:
                xs = [row[activity] for row in run["periods"]]
                ys = [row[welfare] for row in run["periods"]]
                axis.scatter(xs, ys, s=8, alpha=0.6)
                points.extend(zip(xs, ys))
            axis.set_xlabel(activity, fontsize=7)
            axis.set_ylabel(welfare, fontsize=7)
            scatter[f"{activity}_vs_{welfare}"] = points
    plotted["correlation_scatter"] = scatter
    figure.tight_layout()
    figure.savefig(out_dir / "correlation_scatter.png", dpi=120)
    plt.close(figure)
    return plotted
