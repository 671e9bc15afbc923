"""Report figures rendered to PNG files alongside the CSV tables."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

FIGSIZE = (7.0, 4.0)
DPI = 120
BAR_COLOR = "#2a7fb8"
SECOND_COLOR = "#e0903f"


def render_figures(aggregates: dict, out_dir: str | Path) -> list[Path]:
    directory = Path(out_dir)
    directory.mkdir(parents=True, exist_ok=True)
    written = [
        _scenario_bars(
            aggregates["per_scenario"],
            "goal_pct_mean",
            "Goal achievement by scenario (%)",
            directory / "goal_rate_by_scenario.png",
            limit=(0, 105),
        ),
        _scenario_bars(
            aggregates["per_scenario"],
            "latency_s_mean",
            "Mean response latency by scenario (s)",
            directory / "latency_by_scenario.png",
        ),
        _scenario_bars(
            aggregates["per_scenario"],
            "factual_accuracy_pct_mean",
            "Claim accuracy by scenario (%)",
            directory / "claim_accuracy_by_scenario.png",
            limit=(0, 105),
        ),
        _persona_quality(aggregates["per_persona"], directory / "quality_by_persona.png"),
    ]
    return written


def _scenario_bars(rows: list[dict], column: str, title: str, path: Path, limit=None) -> Path:
    names = [row["scenario"] for row in rows]
    values = [row.get(column) if row.get(column) is not None else 0.0 for row in rows]
    fig, ax = plt.subplots(figsize=FIGSIZE)
    ax.bar(range(len(names)), values, color=BAR_COLOR)
    ax.set_xticks(range(len(names)))
    ax.set_xticklabels(names, rotation=30, ha="right", fontsize=8)
    ax.set_title(title)
    if limit:
        ax.set_ylim(*limit)
    ax.grid(axis="y", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)
    return path


def _persona_quality(rows: list[dict], path: Path) -> Path:
    names = [row["persona"] for row in rows]
    qa = [row.get("question_answer_pct_mean") or 0.0 for row in rows]
    appropriate = [row.get("appropriate_response_pct_mean") or 0.0 for row in rows]
    width = 0.38
    fig, ax = plt.subplots(figsize=FIGSIZE)
    xs = range(len(names))
    ax.bar([x - width / 2 for x in xs], qa, width, label="question answer %", color=BAR_COLOR)
    ax.bar([x + width / 2 for x in xs], appropriate, width, label="appropriate response %", color=SECOND_COLOR)
    ax.set_xticks(list(xs))
    ax.set_xticklabels(names, rotation=15, ha="right", fontsize=8)
    ax.set_ylim(0, 105)
    ax.set_title("Interaction quality by persona")
    ax.legend(fontsize=8)
    ax.grid(axis="y", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)
    return path
