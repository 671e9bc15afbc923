from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from conftest import scripted_gateway
from wattson.agents import AgentConfig, MissingAsset, load_prompt_asset, run_agent
from wattson.routing import AgentKind
from wattson.server.config import asset_root
from wattson.tools import (
    ParamSpec,
    ToolCall,
    ToolRegistry,
    ToolResult,
    ToolSpec,
    execute_tool,
    validate_arguments,
)

FORECAST_SPEC = ToolSpec(
    name="get_weather_forecast",
    description="forecast",
    parameters=(
        ParamSpec(name="days", type="integer", description="1-7 days", minimum=1, maximum=7),
    ),
)

SETPOINT_SPEC = ToolSpec(
    name="set_temperature",
    description="set thermostat",
    parameters=(
        ParamSpec(name="setpoint_f", type="number", description="60-85", minimum=60, maximum=85),
    ),
)


def registry_with(spec: ToolSpec, handler) -> ToolRegistry:
    registry = ToolRegistry()
    registry.register(spec, handler)
    return registry


def test_range_violation_names_the_constraint():
    registry = registry_with(FORECAST_SPEC, lambda days: {"days": days})
    result = execute_tool(registry, ToolCall(tool="get_weather_forecast", arguments={"days": 8}))
    assert result.is_error
    assert "days" in result.content and "7" in result.content


def test_below_minimum_rejected():
    registry = registry_with(SETPOINT_SPEC, lambda setpoint_f: setpoint_f)
    result = execute_tool(registry, ToolCall(tool="set_temperature", arguments={"setpoint_f": 59}))
    assert result.is_error
    assert "60" in result.content


def test_wellformed_call_executes():
    registry = registry_with(FORECAST_SPEC, lambda days: {"entries": days})
    result = execute_tool(registry, ToolCall(tool="get_weather_forecast", arguments={"days": 3}))
    assert not result.is_error
    assert result.content == {"entries": 3}


def test_unknown_tool_is_an_observation():
    registry = registry_with(FORECAST_SPEC, lambda days: days)
    result = execute_tool(registry, ToolCall(tool="foo", arguments={}))
    assert result.is_error
    assert "unknown tool" in result.content


def test_handler_exception_becomes_observation():
    def boom(days):
        raise RuntimeError("kaput")

    registry = registry_with(FORECAST_SPEC, boom)
    result = execute_tool(registry, ToolCall(tool="get_weather_forecast", arguments={"days": 2}))
    assert result.is_error
    assert "kaput" in result.content


def test_missing_and_unexpected_parameters():
    registry = registry_with(FORECAST_SPEC, lambda days: days)
    missing = execute_tool(registry, ToolCall(tool="get_weather_forecast", arguments={}))
    assert missing.is_error and "days" in missing.content
    extra = execute_tool(
        registry, ToolCall(tool="get_weather_forecast", arguments={"days": 2, "zone": "x"})
    )
    assert extra.is_error and "zone" in extra.content


def test_type_checks():
    spec = ToolSpec(
        name="t",
        description="typed",
        parameters=(
            ParamSpec(name="flag", type="boolean", description="flag"),
            ParamSpec(name="mode", type="enum", description="mode", choices=("a", "b")),
            ParamSpec(name="when", type="date", description="when", required=False),
            ParamSpec(name="span", type="time-range", description="span", required=False),
        ),
    )
    assert isinstance(validate_arguments(spec, {"flag": "yes", "mode": "a"}), str)
    assert isinstance(validate_arguments(spec, {"flag": True, "mode": "c"}), str)
    assert isinstance(validate_arguments(spec, {"flag": True, "mode": "a", "when": "not a date"}), str)
    assert isinstance(
        validate_arguments(spec, {"flag": True, "mode": "a", "span": {"start": "2025-01-02", "end": "2025-01-01"}}),
        str,
    )
    ok = validate_arguments(
        spec,
        {"flag": False, "mode": "b", "when": "2025-01-01", "span": {"start": "2025-01-01", "end": "2025-01-02"}},
    )
    assert isinstance(ok, dict)


@given(
    st.one_of(
        st.integers(max_value=0),
        st.integers(min_value=8),
        st.floats(allow_nan=False, allow_infinity=False).filter(lambda x: not float(x).is_integer()),
        st.text(max_size=5),
        st.booleans(),
        st.none(),
    )
)
def test_fuzzed_invalid_days_never_reach_handler(bad_value):
    calls = []
    registry = registry_with(FORECAST_SPEC, lambda days: calls.append(days))
    result = execute_tool(
        registry, ToolCall(tool="get_weather_forecast", arguments={"days": bad_value})
    )
    assert result.is_error
    assert calls == []


def test_duplicate_names_rejected():
    registry = registry_with(FORECAST_SPEC, lambda days: days)
    with pytest.raises(ValueError):
        registry.register(FORECAST_SPEC, lambda days: days)


def test_parameter_description_required():
    with pytest.raises(ValueError):
        ParamSpec(name="x", type="string", description="")


# ── reasoning loop ──────────────────────────────────────────────────────


def echo_registry() -> ToolRegistry:
    registry = ToolRegistry()
    registry.register(
        ToolSpec(name="load_energy_data", description="load", parameters=(
            ParamSpec(name="path", type="string", description="path"),
        )),
        lambda path: {"loaded": path},
    )
    return registry


def agent_config(tmp_path: Path, registry: ToolRegistry, max_steps: int = 12) -> AgentConfig:
    prompt = tmp_path / "prompt.md"
    prompt.write_text("You are a test agent.", encoding="utf-8")
    return AgentConfig(kind=AgentKind.ANALYSIS, prompt_path=prompt, registry=registry, max_steps=max_steps)


def test_scripted_run_produces_expected_steps(tmp_path):
    gateway = scripted_gateway(
        [
            {"tool_calls": [{"tool": "load_energy_data", "arguments": {"path": "x.csv"}}]},
            {"content": "Loaded your data."},
        ]
    )
    transcript = run_agent(agent_config(tmp_path, echo_registry()), gateway, [], "load my data")
    kinds = [s.kind for s in transcript.steps]
    assert kinds == ["tool_call", "tool_result", "final"]
    assert transcript.tool_call_count == 1
    assert transcript.final_text == "Loaded your data."


def test_budget_forces_synthesis(tmp_path):
    # Three tool-call responses exhaust the budget; the fourth gateway call
    # happens with no tools offered and must yield the final synthesis.
    call = {"tool_calls": [{"tool": "load_energy_data", "arguments": {"path": "x.csv"}}]}
    gateway = scripted_gateway([call, call, call, {"content": "best effort summary"}])
    transcript = run_agent(
        agent_config(tmp_path, echo_registry(), max_steps=3), gateway, [], "go"
    )
    assert transcript.tool_call_count == 3
    assert transcript.steps[-1].kind == "final"
    assert transcript.final_text == "best effort summary"


def test_budget_fallback_when_model_keeps_calling(tmp_path):
    # A model that answers the forced-synthesis request with yet another
    # tool call still ends the turn with a final step.
    call = {"tool_calls": [{"tool": "load_energy_data", "arguments": {"path": "x.csv"}}]}
    gateway = scripted_gateway([call, call])
    transcript = run_agent(
        agent_config(tmp_path, echo_registry(), max_steps=1), gateway, [], "go"
    )
    assert transcript.tool_call_count == 1
    assert transcript.steps[-1].kind == "final"
    assert "tool budget" in transcript.final_text


def test_unknown_tool_becomes_observation_and_loop_continues(tmp_path):
    gateway = scripted_gateway(
        [
            {"tool_calls": [{"tool": "foo", "arguments": {}}]},
            {"content": "recovered"},
        ]
    )
    transcript = run_agent(agent_config(tmp_path, echo_registry()), gateway, [], "go")
    results = [s for s in transcript.steps if s.kind == "tool_result"]
    assert results[0].payload["is_error"]
    assert "unknown tool" in results[0].payload["content"]
    assert transcript.final_text == "recovered"


def test_tool_calls_pair_with_results(tmp_path):
    gateway = scripted_gateway(
        [
            {"tool_calls": [
                {"tool": "load_energy_data", "arguments": {"path": "a.csv"}},
                {"tool": "load_energy_data", "arguments": {"path": "b.csv"}},
            ]},
            {"content": "done"},
        ]
    )
    transcript = run_agent(agent_config(tmp_path, echo_registry()), gateway, [], "go")
    steps = transcript.steps
    for index, step in enumerate(steps):
        if step.kind == "tool_call":
            follower = steps[index + 1]
            assert follower.kind == "tool_result"
            assert follower.payload["tool"] == step.payload["tool"]
    assert steps[-1].kind == "final"


def test_budget_invariant_holds_for_eager_tool_callers(tmp_path):
    many = {"tool_calls": [
        {"tool": "load_energy_data", "arguments": {"path": f"{i}.csv"}} for i in range(5)
    ]}
    gateway = scripted_gateway([many, {"content": "capped"}])
    transcript = run_agent(agent_config(tmp_path, echo_registry(), max_steps=2), gateway, [], "go")
    assert transcript.tool_call_count == 2
    assert transcript.final_text == "capped"


def test_reasoning_text_recorded(tmp_path):
    gateway = scripted_gateway(
        [
            {"content": "Let me check.", "tool_calls": [
                {"tool": "load_energy_data", "arguments": {"path": "x.csv"}}
            ]},
            {"content": "done"},
        ]
    )
    transcript = run_agent(agent_config(tmp_path, echo_registry()), gateway, [], "go")
    assert transcript.steps[0].kind == "reasoning"
    assert transcript.steps[0].payload["text"] == "Let me check."


def test_events_emitted_live(tmp_path):
    gateway = scripted_gateway(
        [
            {"tool_calls": [{"tool": "load_energy_data", "arguments": {"path": "x.csv"}}]},
            {"content": "ok"},
        ]
    )
    seen = []
    run_agent(
        agent_config(tmp_path, echo_registry()),
        gateway,
        [],
        "go",
        on_event=lambda kind, payload: seen.append(kind),
    )
    assert seen == ["tool_call", "tool_result"]


# ── prompt assets ───────────────────────────────────────────────────────


def test_missing_asset():
    with pytest.raises(MissingAsset):
        load_prompt_asset("/nonexistent/prompt.md")


def test_prompt_assets_carry_their_contracts():
    prompts = asset_root() / "prompts"
    analysis = load_prompt_asset(prompts / "analysis.md").lower()
    assert "never fabricate" in analysis
    control = load_prompt_asset(prompts / "control.md").lower()
    for keyword in ("discover", "validate", "execute", "confirm"):
        assert keyword in control
    assert "confirmation" in control
    knowledge = load_prompt_asset(prompts / "knowledge.md").lower()
    assert "authoritative sources" in knowledge
    assert "cite" in knowledge
