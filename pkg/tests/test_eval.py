import math

import pytest

from wattson.evaluation.aggregate import aggregate, mean_std, write_tables
from wattson.evaluation.annotate import annotate_run
from wattson.evaluation.claims import Claim, extract_claims, verify_claims
from wattson.evaluation.groundtruth import compute_ground_truth
from wattson.evaluation.metrics import (
    METRIC_NAMES,
    METRIC_TIERS,
    TIER1_METRICS,
    compute_metrics,
)
from wattson.evaluation.personas import EvalParseError, load_personas, load_scenarios
from wattson.server.config import asset_root

ASSETS = asset_root() / "eval"


# ── persona/scenario loading ─────────────────────────────────────────────


def test_bundled_personas_and_scenarios():
    personas = load_personas(ASSETS / "personas.json")
    scenarios = load_scenarios(ASSETS / "scenarios.json")
    assert len(personas) == 3
    assert len(scenarios) == 7
    names = {p.name for p in personas}
    assert names == {"confused_newcomer", "tech_savvy_optimizer", "budget_conscious_parent"}
    levels = {p.name: p.technical_level for p in personas}
    assert levels["confused_newcomer"] == "novice"
    assert levels["tech_savvy_optimizer"] == "expert"
    assert levels["budget_conscious_parent"] == "intermediate"
    by_agent = {}
    for scenario in scenarios:
        by_agent.setdefault(scenario.target_agent.value, []).append(scenario.name)
    assert len(by_agent["analysis"]) == 4
    assert len(by_agent["control"]) == 2
    assert len(by_agent["knowledge"]) == 1
    assert all(s.max_turns > 0 and s.success_criteria for s in scenarios)


def test_bad_scenario_rejected(tmp_path):
    bad = tmp_path / "scenarios.json"
    bad.write_text(
        '[{"name": "x", "target_agent": "analysis", "primary_goal": "g", '
        '"success_criteria": ["c"], "max_turns": 0}]',
        encoding="utf-8",
    )
    with pytest.raises(EvalParseError):
        load_scenarios(bad)
    bad.write_text(
        '[{"name": "x", "target_agent": "analysis", "primary_goal": "g", "max_turns": 5}]',
        encoding="utf-8",
    )
    with pytest.raises(EvalParseError):
        load_scenarios(bad)


# ── claims ──────────────────────────────────────────────────────────────


def test_marked_claim_extraction():
    claims = extract_claims("Your hvac used [#claim hvac_total_kwh 12.4 kWh] this week.", turn=1)
    assert len(claims) == 1
    assert claims[0].key == "hvac_total_kwh"
    assert claims[0].value == 12.4
    assert claims[0].unit == "kWh"


def test_plain_claim_extraction():
    claims = extract_claims("your HVAC used 12 kWh yesterday and cost $1.20")
    values = {(c.value, c.unit) for c in claims}
    assert (12.0, "kWh") in values
    assert (1.20, "USD") in values
    assert all(c.key is None for c in claims)


def test_verdicts_and_percent_error():
    claims = [
        Claim(text="12", value=12.0, unit="kWh", key="total"),
        Claim(text="13.5", value=13.5, unit="kWh", key="total"),
        Claim(text="?", value=9.9, unit="kWh", key="unknown_quantity"),
    ]
    verify_claims(claims, {"total": 12.4})
    assert claims[0].verdict == "accurate"
    assert claims[0].percent_error == pytest.approx(3.2258, abs=1e-3)
    assert claims[1].verdict == "inaccurate"
    assert claims[1].percent_error == pytest.approx(8.871, abs=1e-3)
    assert claims[2].verdict == "unverifiable"


def test_five_percent_boundary_is_exact():
    at_boundary = Claim(text="105", value=105.0, unit="kWh", key="q")
    beyond = Claim(text="105.001", value=105.001, unit="kWh", key="q")
    verify_claims([at_boundary, beyond], {"q": 100.0})
    assert at_boundary.percent_error == pytest.approx(5.0)
    assert at_boundary.verdict == "accurate"
    assert beyond.verdict == "inaccurate"


def test_zero_truth_rule():
    zero_ok = Claim(text="0", value=0.0, unit="kWh", key="q")
    zero_bad = Claim(text="1", value=1.0, unit="kWh", key="q")
    verify_claims([zero_ok, zero_bad], {"q": 0.0})
    assert zero_ok.verdict == "accurate"
    assert zero_bad.verdict == "inaccurate"


def test_ground_truth_covers_script_keys(workspace, assets):
    truth = compute_ground_truth(workspace, assets / "home" / "default_home.json")
    for key in (
        "hvac_total_kwh", "home_total_kwh", "appliance_top_share_pct",
        "peak_rate_usd", "default_rate_usd", "tou_total_cost_usd",
        "peak_window_kwh", "peak_shift_savings_usd", "weekday_mean_daily_kwh",
        "weekend_mean_daily_kwh", "ev_charger_cv", "rebate_hpwh_usd",
        "thermostat_main_draw_w", "thermostat_main_setpoint_f_min",
        "hvac_fifth_cost_usd", "peak_shift_savings_monthly_usd",
        "rate_weekend_day_usd",
    ):
        assert key in truth, key


# ── annotator fixtures ──────────────────────────────────────────────────


QA_FIXTURE = [
    {"turn": 1, "role": "user", "content": "Which appliance uses the most power? And when does it peak?"},
    {
        "turn": 1,
        "role": "assistant",
        "content": "Your biggest appliance is the HVAC at 12 kWh daily, peaking at 17:00.",
    },
    {"turn": 2, "role": "user", "content": "Should I buy a windmill?"},
    {"turn": 2, "role": "assistant", "content": "Let's stay focused on the data we have."},
]


def test_three_questions_two_answered():
    annotations = annotate_run(QA_FIXTURE, [], ("hvac",))
    questions = annotations["questions"]
    assert len(questions) == 3
    assert sum(q["answered"] for q in questions) == 2


def test_claim_span_extracted_from_fixture():
    annotations = annotate_run(QA_FIXTURE, [], ("hvac",))
    values = {(c.value, c.unit) for c in annotations["claims"]}
    assert (12.0, "kWh") in values


def test_control_actions_cross_reference_tool_log():
    tool_log = [
        {"turn": 1, "tool": "get_device_list", "arguments": {}, "is_error": False, "status": None, "confirmation_id": None},
        {"turn": 1, "tool": "control_device", "arguments": {"device_id": "thermostat_main", "action": "set_temperature"},
         "is_error": False, "status": "confirmation_required", "confirmation_id": "cfm-0001"},
        {"turn": 2, "tool": "confirm_action", "arguments": {}, "is_error": False, "status": "executed",
         "confirmation_id": "cfm-0001", "content": {"status": "executed", "confirmation_id": "cfm-0001"}},
        {"turn": 3, "tool": "control_device", "arguments": {"device_id": "pool_pump", "action": "power_off"},
         "is_error": False, "status": "executed", "confirmation_id": None},
    ]
    transcript = [
        {"turn": 1, "role": "assistant", "content": "Queued a change on thermostat_main because it saves money."},
        {"turn": 3, "role": "assistant", "content": "pool_pump is off now, to reduce waste."},
    ]
    annotations = annotate_run(transcript, tool_log, ("thermostat_main", "pool_pump"))
    actions = annotations["control_actions"]
    assert len(actions) == 2
    assert all(a["preceded_by_info"] for a in actions)
    assert actions[0]["confirmed"] is True
    assert actions[1]["confirmed"] is False
    assert all(a["explained"] for a in actions)


def test_rejected_control_calls_excluded():
    tool_log = [
        {"turn": 1, "tool": "control_device", "arguments": {"device_id": "x", "action": "a"},
         "is_error": True, "status": None, "confirmation_id": None},
    ]
    annotations = annotate_run([], tool_log, ())
    assert annotations["control_actions"] == []


def test_llm_annotator_shape_matches_rule_based():
    from conftest import scripted_gateway
    from wattson.evaluation.annotate import annotate_run_llm

    canned = {
        "questions": [
            {"turn": 1, "text": "Which appliance uses the most power?", "type": "data",
             "answered": True, "type_match": True}
        ],
        "recommendations": [
            {"turn": 1, "text": "Shift the pool pump to midday.", "actionable": True}
        ],
        "jargon": [{"turn": 1, "term": "kwh", "text": "kWh (a unit)", "explained": True}],
        "claims": [
            {"turn": 1, "text": "12 kWh", "value": 12.0, "unit": "kWh",
             "quantity_key": "hvac_total_kwh"}
        ],
        "sources": ["household.csv"],
        "action_explanations": [],
    }
    gateway = scripted_gateway([{"structured": canned}])
    annotations = annotate_run_llm(QA_FIXTURE, [], gateway, ("hvac",), ("hvac_total_kwh",))
    rule_based = annotate_run(QA_FIXTURE, [], ("hvac",))
    assert set(annotations) == set(rule_based)  # same shape either mode
    assert annotations["claims"][0].key == "hvac_total_kwh"
    assert annotations["questions"][0]["answered"] is True


def test_jargon_and_sources():
    transcript = [
        {"turn": 1, "role": "assistant",
         "content": "You are on a time-of-use (TOU) plan (source: time_of_use_rates.md#0). "
                    "Your setpoint matters too."},
    ]
    annotations = annotate_run(transcript, [], ())
    jargon = {j["term"]: j["explained"] for j in annotations["jargon"]}
    assert jargon["time-of-use"] is True
    assert jargon["setpoint"] is False
    assert annotations["sources"] == ["time_of_use_rates.md#0"]


# ── metrics fixtures ────────────────────────────────────────────────────


def run_record(**overrides):
    record = {
        "goal_achieved": True,
        "turns_used": 5,
        "max_turns": 20,
        "transcript": QA_FIXTURE,
        "tool_log": [],
        "turn_latencies": [1.0, 2.0],
        "error_turns": 0,
        "usage": {
            "total_input_tokens": 100,
            "total_output_tokens": 50,
            "total_cost_usd": 0.01,
            "call_count": 3,
        },
        "is_control": False,
    }
    record.update(overrides)
    return record


def test_task_efficiency_formula():
    metrics = compute_metrics(run_record(), None)
    assert metrics["task_efficiency"] == 4.0  # 20 / 5
    assert metrics["turns_to_completion"] == 5


def test_qa_rate_two_thirds():
    run = run_record()
    annotations = annotate_run(QA_FIXTURE, [], ("hvac",))
    metrics = compute_metrics(run, annotations)
    assert metrics["question_answer_rate_pct"] == pytest.approx(200.0 / 3.0)
    assert metrics["user_questions"] == 3


def test_confirmation_rate_full():
    tool_log = [
        {"turn": 1, "tool": "get_device_list", "arguments": {}, "is_error": False, "status": None, "confirmation_id": None},
        {"turn": 1, "tool": "control_device", "arguments": {"device_id": "a", "action": "x"},
         "is_error": False, "status": "confirmation_required", "confirmation_id": "c1"},
        {"turn": 2, "tool": "confirm_action", "arguments": {}, "is_error": False, "status": "executed",
         "confirmation_id": "c1", "content": {"status": "executed", "confirmation_id": "c1"}},
        {"turn": 3, "tool": "control_device", "arguments": {"device_id": "b", "action": "y"},
         "is_error": False, "status": "confirmation_required", "confirmation_id": "c2"},
        {"turn": 4, "tool": "confirm_action", "arguments": {}, "is_error": False, "status": "executed",
         "confirmation_id": "c2", "content": {"status": "executed", "confirmation_id": "c2"}},
    ]
    run = run_record(is_control=True, tool_log=tool_log)
    annotations = annotate_run([], tool_log, ())
    metrics = compute_metrics(run, annotations)
    assert metrics["action_confirmation_pct"] == 100.0
    assert metrics["control_tools_called"] == 2
    assert metrics["info_tools_called"] == 1


def test_empty_denominators_are_null_not_zero():
    run = run_record(transcript=[], turn_latencies=[], turns_used=0)
    annotations = annotate_run([], [], ())
    metrics = compute_metrics(run, annotations)
    assert metrics["question_answer_rate_pct"] is None
    assert metrics["actionable_recommendation_pct"] is None
    assert metrics["jargon_explained_pct"] is None
    assert metrics["claim_accuracy_pct"] is None
    assert metrics["avg_response_latency_s"] is None
    assert metrics["task_efficiency"] is None


def test_device_metrics_null_outside_control():
    metrics = compute_metrics(run_record(), annotate_run(QA_FIXTURE, [], ()))
    for name in ("info_before_action_pct", "action_confirmation_pct",
                 "action_explanation_pct", "control_tools_called", "info_tools_called"):
        assert metrics[name] is None


def test_tier1_metrics_ignore_the_annotator():
    run = run_record()
    with_annotations = compute_metrics(run, annotate_run(QA_FIXTURE, [], ("hvac",)), {"q": 1.0})
    without = compute_metrics(run, None)
    for number in TIER1_METRICS:
        name = METRIC_NAMES[number]
        assert with_annotations[name] == without[name], name


def test_tier_manifest_covers_all_metrics():
    assert set(METRIC_TIERS) == set(METRIC_NAMES) == set(range(1, 24))
    assert set(METRIC_TIERS.values()) == {1, 2, 3}
    # the spec's tier-1 list
    assert TIER1_METRICS == (2, 3, 11, 13, 14, 15, 16, 17, 18, 22, 23)


# ── aggregation ─────────────────────────────────────────────────────────


def test_mean_std_basics():
    assert mean_std([2.0, 2.0, 2.0]) == (2.0, 0.0)
    mean, std = mean_std([1.0])
    assert mean == 1.0 and std is None
    assert mean_std([None, None]) == (None, None)
    mean, std = mean_std([1.0, None, 3.0])
    assert mean == 2.0
    assert std == pytest.approx(math.sqrt(2.0))


def make_report(scenario, persona, goal, qa=90.0):
    metrics = {name: None for name in METRIC_NAMES.values()}
    metrics.update(
        {
            "goal_achievement": goal,
            "turns_to_completion": 4,
            "question_answer_rate_pct": qa,
            "appropriate_response_rate_pct": 80.0,
            "claim_accuracy_pct": 95.0,
            "avg_response_latency_s": 2.0,
        }
    )
    return {"scenario": scenario, "persona": persona, "metrics": metrics}


def test_goal_rate_fifty_percent():
    reports = [make_report("s", "p", True), make_report("s", "p", False)]
    table = aggregate(reports)["per_scenario"]
    assert table[0]["goal_pct_mean"] == 50.0


def test_identical_reports_zero_std():
    reports = [make_report("s", "p", True) for _ in range(3)]
    result = aggregate(reports)
    assert result["per_scenario"][0]["question_answer_pct_std"] == 0.0


def test_single_report_null_std():
    result = aggregate([make_report("s", "p", True)])
    assert result["per_scenario"][0]["question_answer_pct_std"] is None
    assert result["per_scenario"][0]["question_answer_pct_mean"] == 90.0


def test_tables_written(tmp_path):
    reports = [make_report("s1", "p1", True), make_report("s2", "p1", False)]
    written = write_tables(aggregate(reports), tmp_path)
    names = {path.name for path in written}
    assert names == {"per_scenario.csv", "per_persona.csv", "overall.csv"}
    header = (tmp_path / "per_scenario.csv").read_text().splitlines()[0]
    assert header.startswith("scenario,runs,goal_pct_mean")
