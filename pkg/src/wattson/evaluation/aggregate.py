"""Aggregation of per-run metric reports into summary tables.

Three views: per scenario, per persona, and overall. Rows carry mean and
sample standard deviation (std is null for a single report); null metric
values are skipped, and an all-null column aggregates to null.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path
from typing import Any, Iterable

# Columns mirrored by the per-scenario / per-persona tables.
TABLE_COLUMNS: tuple[tuple[str, str], ...] = (
    ("goal_pct", "goal_achievement"),
    ("turns", "turns_to_completion"),
    ("question_answer_pct", "question_answer_rate_pct"),
    ("appropriate_response_pct", "appropriate_response_rate_pct"),
    ("factual_accuracy_pct", "claim_accuracy_pct"),
    ("latency_s", "avg_response_latency_s"),
)

OVERALL_METRICS: tuple[str, ...] = (
    "goal_achievement",
    "turns_to_completion",
    "task_efficiency",
    "claim_accuracy_pct",
    "mean_claim_error_pct",
    "verifiable_claims",
    "question_answer_rate_pct",
    "appropriate_response_rate_pct",
    "actionable_recommendation_pct",
    "jargon_explained_pct",
    "avg_response_chars",
    "sources_referenced",
    "user_questions",
    "avg_response_latency_s",
    "error_rate_pct",
    "tool_calls",
    "tokens_total",
    "cost_usd",
    "info_before_action_pct",
    "action_confirmation_pct",
    "action_explanation_pct",
    "control_tools_called",
    "info_tools_called",
)


def mean_std(values: Iterable[float | bool | None]) -> tuple[float | None, float | None]:
    xs = [float(v) for v in values if v is not None]
    if not xs:
        return None, None
    mean = sum(xs) / len(xs)
    if len(xs) < 2:
        return mean, None
    variance = sum((x - mean) ** 2 for x in xs) / (len(xs) - 1)
    return mean, math.sqrt(variance)


def _metric_values(reports: list[dict], metric: str, scale: float = 1.0) -> list[float | None]:
    out = []
    for report in reports:
        value = report["metrics"].get(metric)
        out.append(None if value is None else float(value) * scale)
    return out


def _table(reports: list[dict], key: str) -> list[dict[str, Any]]:
    groups: dict[str, list[dict]] = {}
    for report in reports:
        groups.setdefault(report[key], []).append(report)
    rows = []
    for name in sorted(groups):
        members = groups[name]
        row: dict[str, Any] = {key: name, "runs": len(members)}
        for column, metric in TABLE_COLUMNS:
            scale = 100.0 if metric == "goal_achievement" else 1.0
            mean, std = mean_std(_metric_values(members, metric, scale))
            row[f"{column}_mean"] = mean
            row[f"{column}_std"] = std
        rows.append(row)
    return rows


def aggregate(reports: list[dict]) -> dict[str, Any]:
    """Per-scenario, per-persona, and overall summaries for a batch."""
    if not reports:
        raise ValueError("aggregate needs at least one report")
    overall = {}
    for metric in OVERALL_METRICS:
        scale = 100.0 if metric == "goal_achievement" else 1.0
        mean, std = mean_std(_metric_values(reports, metric, scale))
        overall[metric] = {"mean": mean, "std": std}
    return {
        "runs": len(reports),
        "per_scenario": _table(reports, "scenario"),
        "per_persona": _table(reports, "persona"),
        "overall": overall,
    }


def write_tables(aggregates: dict[str, Any], out_dir: str | Path) -> list[Path]:
    """CSV renderings of the three summary tables."""
    directory = Path(out_dir)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for key, rows in (("scenario", aggregates["per_scenario"]), ("persona", aggregates["per_persona"])):
        path = directory / f"per_{key}.csv"
        header = [key, "runs"]
        for column, _ in TABLE_COLUMNS:
            header += [f"{column}_mean", f"{column}_std"]
        with path.open("w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([_cell(row.get(column)) for column in header])
        written.append(path)

    overall_path = directory / "overall.csv"
    with overall_path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["metric", "mean", "std"])
        for metric, stats in aggregates["overall"].items():
            writer.writerow([metric, _cell(stats["mean"]), _cell(stats["std"])])
    written.append(overall_path)
    return written


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)
