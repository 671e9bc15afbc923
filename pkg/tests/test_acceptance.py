"""Acceptance criteria, one test per criterion, printed as pass/fail lines.

Run with `pytest tests/test_acceptance.py -v -s` to see one line per
criterion. Tolerances are pinned here: analytics oracle equivalence at
1e-9 relative, claim accuracy boundary exactly at 5%, runtime budgets per
criterion.
"""

import hashlib
import itertools
import json
import math
import random
import time
from collections import Counter
from datetime import datetime, timedelta

import pytest

import oracle
from wattson.analytics.dataset import TimeRange
from wattson.analytics.engine import AnalyticsEngine
from wattson.analytics.errors import FlatRateNoPeaks
from wattson.analytics.synthetic import APPLIANCES, HOURS, manifest
from wattson.analytics.tools import build_analysis_registry
from wattson.devices.home import (
    ConfirmationExpired,
    ConfirmationRequired,
    Executed,
    Rejected,
    UnknownConfirmation,
    load_home_config,
)
from wattson.devices.tools import build_control_registry
from wattson.evaluation.annotate import annotate_run
from wattson.evaluation.claims import Claim, verify_claims
from wattson.evaluation.metrics import METRIC_NAMES, TIER1_METRICS, compute_metrics
from wattson.evaluation.personas import load_personas, load_scenarios
from wattson.evaluation.runner import run_evaluation
from wattson.gateway import ChatRequest, Gateway, Message, ProviderCascade, ProviderConfig
from wattson.knowledge.service import KnowledgeService
from wattson.knowledge.tools import build_knowledge_registry
from wattson.knowledge.weather import InvalidDays, WeatherClient
from wattson.routing import AgentKind, Clarify, Route, tally_votes
from wattson.server.config import asset_root

REL = 1e-9


def close(a, b):
    return math.isclose(a, b, rel_tol=REL, abs_tol=1e-12)


def report(line: str) -> None:
    print(f"\n[ACCEPTANCE] {line}")


def test_router_oracle():
    """All 81 vote vectors match the tally oracle; ties clarify; order-free."""
    started = time.monotonic()
    kinds = list(AgentKind)
    for vector in itertools.product(kinds, repeat=4):
        counts = Counter(vector)
        top = max(counts.values())
        winners = {k for k, c in counts.items() if c == top}
        outcome = tally_votes(list(vector))
        if len(winners) == 1:
            assert isinstance(outcome, Route) and outcome.agent in winners
        else:
            assert isinstance(outcome, Clarify) and set(outcome.options) == winners

    rng = random.Random(81)
    for _ in range(1000):
        votes = [rng.choice(kinds) for _ in range(rng.randint(2, 4))]
        baseline = tally_votes(votes)
        shuffled = list(votes)
        rng.shuffle(shuffled)
        assert tally_votes(shuffled) == baseline

    elapsed = time.monotonic() - started
    assert elapsed < 1.0, f"router oracle took {elapsed:.2f}s (budget 1s)"
    report(f"PASS router oracle: 81 vectors + 1000 permutations in {elapsed:.3f}s")


def test_analytics_oracle(workspace):
    """All 18 analysis ops match brute force within 1e-9 rel; conservation exact."""
    started = time.monotonic()
    timestamps, series = oracle.load(workspace / "household.csv")
    home = oracle.home_series(series)

    engine = AnalyticsEngine(workspace)
    registry = build_analysis_registry(engine)
    assert len(registry) == 18

    # 1-3 data loading and metadata
    meta = engine.load_energy_data("household.csv")
    expected = manifest()
    assert meta["samples"] == expected["samples"]
    assert meta["appliances"] == expected["appliances"]
    listing = engine.list_available_data()
    assert {f["kind"] for f in listing["files"]} == {"energy", "rate", "thresholds"}
    assert engine.get_tracked_appliances()["appliances"] == list(APPLIANCES)

    # 4 analyze_consumption
    consumption = engine.analyze_consumption()
    assert close(consumption["total_kwh"], sum(home))
    assert close(consumption["mean_kwh_per_interval"], sum(home) / len(home))
    peak_index = home.index(max(home))
    assert consumption["peak_interval"]["timestamp"] == timestamps[peak_index].isoformat()

    # 5 analyze_appliances + conservation of shares/totals
    ranking = engine.analyze_appliances()
    totals = {name: sum(series[name]) for name in oracle.tracked(series)}
    for row in ranking["ranking"]:
        assert close(row["total_kwh"], totals[row["appliance"]])
    assert close(sum(r["share_percent"] for r in ranking["ranking"]), 100.0)
    assert close(sum(r["total_kwh"] for r in ranking["ranking"]), consumption["total_kwh"])

    # 6 query_energy_data (daily sums)
    daily = engine.query_energy_data(aggregation="daily")
    expected_daily = oracle.daily_totals(home, timestamps, range(len(home)))
    assert len(daily["buckets"]) == len(expected_daily)
    for bucket in daily["buckets"]:
        assert close(bucket["total_kwh"], expected_daily[bucket["bucket"]])

    # 7 compare_energy_periods + range additivity
    a, b, c = datetime(2025, 3, 3), datetime(2025, 3, 10), datetime(2025, 3, 17)
    compared = engine.compare_energy_periods(TimeRange(a, b), TimeRange(b, c))
    first = sum(home[i] for i in oracle.in_range(timestamps, a, b))
    second = sum(home[i] for i in oracle.in_range(timestamps, b, c))
    assert close(compared["total"]["period_one_kwh"], first)
    assert close(compared["total"]["period_two_kwh"], second)
    union = engine.analyze_consumption(TimeRange(a, c))["total_kwh"]
    assert close(first + second, union)

    # 8 analyze_energy_period
    period = engine.analyze_energy_period(TimeRange(a, b), "daily")
    assert close(period["total_kwh"], first)

    # 9 calculate_rolling_average
    rolling = engine.calculate_rolling_average(24, appliance="hvac")
    expected_rolling = oracle.rolling_mean(series["hvac"], 24)
    for got, want in zip((p["kwh"] for p in rolling["smoothed"]), expected_rolling):
        assert (got is None) == (want is None) or close(got, want)
        if want is not None:
            assert close(got, want)

    # 10 compare_weekday_weekend
    weekparts = engine.compare_weekday_weekend()
    day_totals = oracle.daily_totals(home, timestamps, range(len(home)))
    weekday = [v for d, v in day_totals.items() if datetime.fromisoformat(d).weekday() < 5]
    weekend = [v for d, v in day_totals.items() if datetime.fromisoformat(d).weekday() >= 5]
    assert close(weekparts["total"]["weekday_mean_daily_kwh"], sum(weekday) / len(weekday))
    assert close(weekparts["total"]["weekend_mean_daily_kwh"], sum(weekend) / len(weekend))

    # 11 analyze_peak_hours
    tou_doc = json.loads((workspace / "tou_summer.json").read_text())
    rates = [p["rate_per_kwh"] for p in tou_doc["periods"]] + [tou_doc["default_rate_per_kwh"]]
    peak_rate, cheapest = max(rates), min(rates)
    peak_kwh = sum(
        home[i] for i in range(len(home))
        if oracle.resolve_rate(tou_doc, timestamps[i]) == peak_rate
    )
    peaks = engine.analyze_peak_hours("tou_summer")
    assert close(peaks["peak_kwh"], peak_kwh)
    assert close(peaks["estimated_savings_usd"], 0.3 * peak_kwh * (peak_rate - cheapest))
    with pytest.raises(FlatRateNoPeaks):
        engine.analyze_peak_hours("flat_standard")

    # 12 analyze_usage_frequency
    thresholds = json.loads((workspace / "thresholds.json").read_text())
    runs = oracle.run_lengths(series["ev_charger"], thresholds["ev_charger"])
    frequency = engine.analyze_usage_frequency("ev_charger")
    assert frequency["event_count"] == len(runs)

    # 13 analyze_usage_variability
    variability = {r["appliance"]: r for r in engine.analyze_usage_variability()["appliances"]}
    for name in oracle.tracked(series):
        mean, sigma = oracle.population_stats(series[name])
        assert close(variability[name]["std_dev_kwh"], sigma)
        assert close(variability[name]["coefficient_of_variation"], sigma / mean)

    # 14 get_utility_rate + 168-slot resolution totality
    schedule_payload = engine.get_utility_rate("tou_summer")
    assert schedule_payload["type"] == "tou"
    base = datetime(2025, 3, 3)
    from wattson.analytics.rates import load_rate_schedule

    schedule = load_rate_schedule(workspace / "tou_summer.json")
    for day in range(7):
        for hour in range(24):
            stamp = base + timedelta(days=day, hours=hour)
            rate, _ = schedule.resolve(stamp)
            assert rate == oracle.resolve_rate(tou_doc, stamp)

    # 15 analyze_utility_rate + cost conservation
    costing = engine.analyze_utility_rate("tou_summer")
    expected_cost = sum(
        home[i] * oracle.resolve_rate(tou_doc, timestamps[i]) for i in range(len(home))
    )
    assert close(costing["total_cost_usd"], expected_cost)
    assert close(sum(p["cost_usd"] for p in costing["periods"]), costing["total_cost_usd"])
    assert close(sum(p["kwh"] for p in costing["periods"]), costing["total_kwh"])

    # 16 analyze_solar_availability
    solar = series["solar_generation"]
    availability = engine.analyze_solar_availability()
    assert close(availability["total_kwh"], sum(solar))

    # 17 analyze_solar_alignment
    alignment = engine.analyze_solar_alignment("pool_pump")
    overlap = sum(series["pool_pump"][i] for i in range(HOURS) if solar[i] > 0)
    assert close(alignment["alignment_score"], overlap / sum(series["pool_pump"]))

    # 18 get_analysis_summary (dedup rule)
    summary = engine.get_analysis_summary()
    tools_seen = [f["tool"] for f in summary["findings"]]
    assert len(tools_seen) == len(set(tools_seen))
    assert len(tools_seen) >= 10

    elapsed = time.monotonic() - started
    assert elapsed < 60.0, f"analytics oracle took {elapsed:.1f}s (budget 60s)"
    report(f"PASS analytics oracle: 18 ops vs brute force at 1e-9 rel in {elapsed:.1f}s")


def test_safety_boundaries():
    """60/85 accepted, 59/86 rejected; 10k fuzz keeps ranges + confirmation gating."""
    config_path = asset_root() / "home" / "default_home.json"
    home = load_home_config(config_path)

    for value in (60, 85):
        outcome = home.control_device(
            "thermostat_main", "set_temperature", {"setpoint_f": value}
        )
        assert isinstance(outcome, ConfirmationRequired)
        result = home.confirm_action(outcome.confirmation.confirmation_id, True)
        assert result["status"] == "executed"
        assert (
            home.get_device_status("thermostat_main")["settings"]["setpoint_f"]["value"] == value
        )
    for value in (59, 86):
        outcome = home.control_device(
            "thermostat_main", "set_temperature", {"setpoint_f": value}
        )
        assert isinstance(outcome, Rejected), value

    # 10,000 fuzzed commands: ranges always hold, rejected commands never
    # mutate, and significant actions only execute through an approval.
    rng = random.Random(0xBEEF)
    home = load_home_config(config_path)
    device_ids = [d["device_id"] for d in home.get_device_list()]
    actions = {d: home.get_available_actions(d)["actions"] for d in device_ids}
    pending: list[str] = []
    executed_significant = 0

    def assert_ranges():
        for device_id in device_ids:
            for name, setting in home.get_device_status(device_id)["settings"].items():
                assert setting["min"] <= setting["value"] <= setting["max"]

    for step in range(10_000):
        if pending and rng.random() < 0.2:
            cid = pending.pop(rng.randrange(len(pending)))
            try:
                result = home.confirm_action(cid, approved=rng.random() < 0.7)
                if result["status"] in ("executed", "scheduled"):
                    executed_significant += 1
            except (UnknownConfirmation, ConfirmationExpired):
                pass
            continue
        device_id = rng.choice(device_ids)
        action = rng.choice(actions[device_id])
        arguments = {}
        for param in action["parameters"]:
            kind = param["type"]
            if kind in ("number", "integer"):
                value = rng.uniform(param.get("min", 0) - 25, param.get("max", 100) + 25)
                arguments[param["name"]] = int(value) if kind == "integer" else value
            elif kind == "enum":
                arguments[param["name"]] = rng.choice(list(param["choices"]) + ["bogus"])
        check_mutation = rng.random() < 0.1
        before = home.fleet_snapshot() if check_mutation else None
        outcome = home.control_device(device_id, action["name"], arguments)
        if isinstance(outcome, ConfirmationRequired):
            pending.append(outcome.confirmation.confirmation_id)
            if check_mutation:
                assert home.fleet_snapshot() == before  # queued, not applied
        elif isinstance(outcome, Rejected) and check_mutation:
            assert home.fleet_snapshot() == before
        if step % 500 == 0:
            assert_ranges()
    assert_ranges()
    assert executed_significant > 0  # the gate was actually exercised
    report(
        "PASS safety boundaries: 60/85 in, 59/86 out; 10,000 fuzzed commands kept "
        f"ranges, {executed_significant} significant actions all gated by approval"
    )


def test_forecast_bound(assets):
    """days 1..7 return exact lengths; 0 and 8 rejected."""
    weather = WeatherClient(mode="fixture", fixture_dir=assets / "weather", default_location="tucson")
    for days in range(1, 8):
        assert len(weather.forecast(days=days)["days"]) == days
    for days in (0, 8):
        with pytest.raises(InvalidDays):
            weather.forecast(days=days)
    report("PASS forecast bound: lengths exact for 1-7, rejected at 0 and 8")


def test_metrics_engine():
    """Fixture transcripts reproduce hand-computed values; tiers separate."""
    transcript = [
        {"turn": 1, "role": "user", "content": "Which appliance uses the most power? And when does it peak? Should I worry?"},
        {"turn": 1, "role": "assistant", "content": "Your top appliance is the HVAC, peaking evenings."},
        {"turn": 2, "role": "user", "content": "Thanks."},
        {"turn": 2, "role": "assistant", "content": "Anytime."},
    ]
    annotations = annotate_run(transcript, [], ("hvac",))
    assert len(annotations["questions"]) == 3
    assert sum(q["answered"] for q in annotations["questions"]) == 2

    run = {
        "goal_achieved": True,
        "turns_used": 5,
        "max_turns": 20,
        "transcript": transcript,
        "tool_log": [],
        "turn_latencies": [1.0],
        "error_turns": 0,
        "usage": {"total_input_tokens": 10, "total_output_tokens": 5, "total_cost_usd": 0.0, "call_count": 1},
        "is_control": False,
    }
    metrics = compute_metrics(run, annotations)
    assert metrics["question_answer_rate_pct"] == pytest.approx(66.6667, abs=1e-3)
    assert metrics["task_efficiency"] == 4.0

    at_boundary = Claim(text="x", value=105.0, unit="kWh", key="q")
    beyond = Claim(text="x", value=105.001, unit="kWh", key="q")
    verify_claims([at_boundary, beyond], {"q": 100.0})
    assert at_boundary.verdict == "accurate"  # error exactly 5.000%
    assert beyond.verdict == "inaccurate"  # error 5.001%

    with_annotator = compute_metrics(run, annotations)
    without_annotator = compute_metrics(run, None)
    for number in TIER1_METRICS:
        name = METRIC_NAMES[number]
        assert with_annotator[name] == without_annotator[name]
    report(
        "PASS metrics engine: QA 66.7%, efficiency 4.0, 5% boundary exact, "
        "tier-1 unchanged without annotator"
    )


def test_cascade_failover():
    """Provider 1 down: all traffic succeeds via provider 2, zero user errors."""
    cascade = ProviderCascade.of(
        ProviderConfig(name="primary", kind="scripted", fixture_path="inline"),
        ProviderConfig(name="backup", kind="scripted", fixture_path="inline"),
    )
    calls = 20
    gateway = Gateway(
        cascade,
        scripted_responses={
            "primary": [{"error": "connection refused"}] * calls,
            "backup": [{"content": f"answer {i}"} for i in range(calls)],
        },
    )
    request = ChatRequest(messages=(Message(role="user", content="hi"),))
    errors = 0
    for i in range(calls):
        response = gateway.complete(request)
        assert response.provider_used == "backup"
        assert response.fallback_count == 1
        if not response.content:
            errors += 1
    assert errors == 0
    report(f"PASS cascade: {calls}/{calls} calls served by backup with fallback_count 1, error rate 0%")


def test_end_to_end_scripted_evaluation(tmp_path):
    """21 deterministic runs, all 23 metrics populated, IBA 100% on control."""
    started = time.monotonic()
    personas = load_personas(asset_root() / "eval" / "personas.json")
    scenarios = load_scenarios(asset_root() / "eval" / "scenarios.json")
    assert len(personas) == 3 and len(scenarios) == 7

    first_dir = tmp_path / "first"
    second_dir = tmp_path / "second"
    first = run_evaluation(personas, scenarios, reps=1, mode="scripted", out_dir=first_dir)
    second = run_evaluation(personas, scenarios, reps=1, mode="scripted", out_dir=second_dir)

    assert first["total_runs"] == 21
    control_names = {s.name for s in scenarios if s.is_control}
    device_metrics = (
        "info_before_action_pct", "action_confirmation_pct",
        "action_explanation_pct", "control_tools_called", "info_tools_called",
    )
    for run in first["runs"]:
        metrics = run["metrics"]
        assert set(metrics) == set(METRIC_NAMES.values())
        if run["scenario"] in control_names:
            for name in metrics:
                assert metrics[name] is not None, (run["scenario"], name)
            assert metrics["info_before_action_pct"] == 100.0
        else:
            for name in device_metrics:
                assert metrics[name] is None
            for name in metrics:
                if name not in device_metrics:
                    assert metrics[name] is not None, (run["scenario"], name)

    def digest(directory):
        hasher = hashlib.sha256()
        for path in sorted(directory.rglob("*")):
            if path.is_file() and path.suffix in (".json", ".csv"):
                hasher.update(str(path.relative_to(directory)).encode())
                hasher.update(path.read_bytes())
        return hasher.hexdigest()

    assert digest(first_dir) == digest(second_dir), "reports are not bit-identical"
    assert (first_dir / "report.json").is_file()
    assert (first_dir / "tables" / "per_scenario.csv").is_file()
    assert (first_dir / "figures" / "goal_rate_by_scenario.png").is_file()

    elapsed = time.monotonic() - started
    assert elapsed < 300.0, f"scripted evaluation took {elapsed:.0f}s (budget 300s)"
    report(
        f"PASS end-to-end scripted eval: 21 runs, bit-identical twice, "
        f"23 metrics populated, IBA 100% on control, in {elapsed:.1f}s"
    )


def test_tool_coverage_audit(workspace, assets):
    """Registries hold exactly 18 / 8 / 10 tools with the canonical names."""
    engine = AnalyticsEngine(workspace)
    knowledge = KnowledgeService(assets / "corpus")
    weather = WeatherClient(mode="fixture", fixture_dir=assets / "weather")
    home = load_home_config(assets / "home" / "default_home.json")

    analysis = build_analysis_registry(engine)
    knowledge_registry = build_knowledge_registry(knowledge, weather, engine)
    control = build_control_registry(home, engine, weather)

    assert analysis.names() == [
        "load_energy_data", "list_available_data", "get_tracked_appliances",
        "analyze_consumption", "analyze_appliances", "query_energy_data",
        "compare_energy_periods", "analyze_energy_period",
        "calculate_rolling_average", "compare_weekday_weekend",
        "analyze_peak_hours", "analyze_usage_frequency",
        "analyze_usage_variability", "get_utility_rate", "analyze_utility_rate",
        "analyze_solar_availability", "analyze_solar_alignment",
        "get_analysis_summary",
    ]
    assert knowledge_registry.names() == [
        "energy_knowledge", "search_energy_documents", "get_knowledge_base_status",
        "get_current_weather", "get_weather_forecast", "get_weather_energy_impact",
        "get_historical_weather", "get_user_context",
    ]
    assert control.names() == [
        "get_device_list", "get_device_status", "get_all_devices_energy",
        "control_device", "get_available_actions", "get_device_energy",
        "schedule_device_action", "get_automation_rules", "get_utility_rate",
        "get_current_weather",
    ]
    assert (len(analysis), len(knowledge_registry), len(control)) == (18, 8, 10)
    report("PASS coverage audit: registries carry exactly 18 / 8 / 10 canonical tools")
