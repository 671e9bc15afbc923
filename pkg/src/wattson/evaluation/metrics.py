"""The 23 objective metrics and their tier manifest.

Tier 1 metrics are pure counting over the run record and must not touch
annotations (disabling the annotator leaves them unchanged); tier 2
metrics score annotator extractions deterministically; tier 3 metrics
verify numeric claims against ground truth. Every rate reports null on an
empty denominator, never 0% or 100%.
"""

from __future__ import annotations

from typing import Any

from wattson.evaluation.claims import Claim, claim_payload, verify_claims

METRIC_NAMES: dict[int, str] = {
    1: "goal_achievement",
    2: "turns_to_completion",
    3: "task_efficiency",
    4: "claim_accuracy_pct",
    5: "mean_claim_error_pct",
    6: "verifiable_claims",
    7: "question_answer_rate_pct",
    8: "appropriate_response_rate_pct",
    9: "actionable_recommendation_pct",
    10: "jargon_explained_pct",
    11: "avg_response_chars",
    12: "sources_referenced",
    13: "user_questions",
    14: "avg_response_latency_s",
    15: "error_rate_pct",
    16: "tool_calls",
    17: "tokens_total",
    18: "cost_usd",
    19: "info_before_action_pct",
    20: "action_confirmation_pct",
    21: "action_explanation_pct",
    22: "control_tools_called",
    23: "info_tools_called",
}

GROUPS: dict[str, tuple[int, ...]] = {
    "task_performance": (1, 2, 3),
    "factual_accuracy": (4, 5, 6),
    "interaction_quality": (7, 8, 9, 10, 11, 12, 13),
    "system_efficiency": (14, 15, 16, 17, 18),
    "device_control": (19, 20, 21, 22, 23),
}

# Tier 1: pure counting, zero model calls; tier 2: extraction with
# deterministic scoring; tier 3: ground-truth claim verification.
METRIC_TIERS: dict[int, int] = {
    1: 2, 2: 1, 3: 1,
    4: 3, 5: 3, 6: 3,
    7: 2, 8: 2, 9: 2, 10: 2, 11: 1, 12: 2, 13: 1,
    14: 1, 15: 1, 16: 1, 17: 1, 18: 1,
    19: 2, 20: 2, 21: 2, 22: 1, 23: 1,
}

TIER1_METRICS = tuple(sorted(n for n, tier in METRIC_TIERS.items() if tier == 1))

CONTROL_TOOLS = ("control_device", "schedule_device_action")
DEVICE_CONTROL_METRICS = (19, 20, 21, 22, 23)


def compute_metrics(
    run: dict[str, Any],
    annotations: dict[str, Any] | None,
    ground_truth: dict[str, float] | None = None,
) -> dict[str, Any]:
    """Score one run. ``annotations=None`` leaves tier 2/3 metrics null.

    ``run`` fields used: goal_achieved, turns_used, max_turns, transcript,
    tool_log, turn_latencies, error_turns, usage, is_control.
    """
    values: dict[int, Any] = {number: None for number in METRIC_NAMES}

    # ── tier 1: pure counting ───────────────────────────────────────────
    turns = run["turns_used"]
    values[2] = turns
    values[3] = (run["max_turns"] / turns) if turns > 0 else None
    responses = [m for m in run["transcript"] if m["role"] == "assistant"]
    values[11] = (sum(len(m["content"]) for m in responses) / len(responses)) if responses else None
    values[13] = sum(
        sentence.endswith("?")
        for m in run["transcript"]
        if m["role"] == "user"
        for sentence in _sentences(m["content"])
    )
    latencies = run["turn_latencies"]
    values[14] = (sum(latencies) / len(latencies)) if latencies else None
    values[15] = (run["error_turns"] / turns * 100.0) if turns > 0 else None
    values[16] = len(run["tool_log"])
    usage = run["usage"]
    values[17] = usage["total_input_tokens"] + usage["total_output_tokens"]
    values[18] = usage["total_cost_usd"]
    if run["is_control"]:
        values[22] = sum(1 for t in run["tool_log"] if t["tool"] in CONTROL_TOOLS)
        values[23] = sum(
            1
            for t in run["tool_log"]
            if t["tool"] not in CONTROL_TOOLS and t["tool"] != "confirm_action"
        )

    # ── tier 2/3: need the annotator ────────────────────────────────────
    values[1] = run["goal_achieved"]
    if annotations is not None:
        questions = annotations["questions"]
        values[7] = _rate(sum(q["answered"] for q in questions), len(questions))
        values[8] = _rate(sum(q["type_match"] for q in questions), len(questions))
        recommendations = annotations["recommendations"]
        values[9] = _rate(sum(r["actionable"] for r in recommendations), len(recommendations))
        jargon = annotations["jargon"]
        values[10] = _rate(sum(j["explained"] for j in jargon), len(jargon))
        values[12] = len(annotations["sources"])

        claims: list[Claim] = annotations["claims"]
        if ground_truth is not None:
            verify_claims(claims, ground_truth)
        verified = [c for c in claims if c.verdict in ("accurate", "inaccurate")]
        values[4] = _rate(sum(c.verdict == "accurate" for c in verified), len(verified))
        finite_errors = [c.percent_error for c in verified if c.percent_error is not None and c.percent_error != float("inf")]
        values[5] = (sum(finite_errors) / len(finite_errors)) if finite_errors else None
        values[6] = len(verified)

        if run["is_control"]:
            actions = annotations["control_actions"]
            values[19] = _rate(sum(a["preceded_by_info"] for a in actions), len(actions))
            values[20] = _rate(sum(a["confirmed"] for a in actions), len(actions))
            values[21] = _rate(sum(a["explained"] for a in actions), len(actions))

    if not run["is_control"]:
        for number in DEVICE_CONTROL_METRICS:
            values[number] = None

    return {METRIC_NAMES[number]: values[number] for number in sorted(METRIC_NAMES)}


def metrics_by_group(metrics: dict[str, Any]) -> dict[str, dict[str, Any]]:
    return {
        group: {METRIC_NAMES[n]: metrics[METRIC_NAMES[n]] for n in numbers}
        for group, numbers in GROUPS.items()
    }


def serialize_annotations(annotations: dict[str, Any] | None) -> dict[str, Any] | None:
    if annotations is None:
        return None
    payload = dict(annotations)
    payload["claims"] = [claim_payload(c) for c in annotations["claims"]]
    return payload


def _rate(numerator: int, denominator: int) -> float | None:
    if denominator == 0:
        return None
    return numerator / denominator * 100.0


def _sentences(text: str) -> list[str]:
    import re

    return [s.strip() for s in re.split(r"(?<=[.!?])\s+", text) if s.strip()]
