"""Drive persona-x-scenario conversations and score them.

Scripted mode runs the full stack (router, agents, tools, simulated
home) against a planned gateway backend and a virtual clock: no network,
no credentials, and bit-identical outputs across executions. Live mode
swaps in real providers and the LLM simulated user/annotator.

Each run gets an isolated session, analytics engine, and device-sim
instance; per-run failures are recorded and the batch continues.
"""

from __future__ import annotations

import json
import shutil
import threading
from pathlib import Path
from typing import Any, Callable

from wattson.analytics.synthetic import write_household_csv
from wattson.evaluation.aggregate import aggregate, write_tables
from wattson.evaluation.annotate import annotate_run, annotate_run_llm
from wattson.evaluation.figures import render_figures
from wattson.evaluation.groundtruth import compute_ground_truth
from wattson.evaluation.metrics import compute_metrics, serialize_annotations
from wattson.evaluation.personas import Persona, Scenario
from wattson.evaluation.scripts import PlannedBackend, ScriptTurn
from wattson.evaluation.simulator import ScriptedUser, StopSignal, simulate_user_turn
from wattson.gateway import Gateway, ProviderCascade, ProviderConfig
from wattson.server.config import AppConfig, asset_root
from wattson.server.service import ChatService
from wattson.knowledge.service import KnowledgeService

KNOWN_ENTITIES = (
    "hvac", "water_heater", "water heater", "refrigerator", "ev_charger",
    "ev charger", "pool_pump", "pool pump", "thermostat", "thermostat_main",
    "living_room_light",
)


class VirtualTime:
    """Monotone counter standing in for wall time: one second per reading."""

    def __init__(self, start: float = 0.0, tick: float = 1.0):
        self._now = start
        self._tick = tick
        self._lock = threading.Lock()

    def __call__(self) -> float:
        with self._lock:
            self._now += self._tick
            return self._now


def prepare_workspace(directory: str | Path) -> Path:
    """Materialize the bundled dataset, rates, and thresholds for a batch."""
    workspace = Path(directory)
    workspace.mkdir(parents=True, exist_ok=True)
    write_household_csv(workspace / "household.csv")
    for bundled in sorted((asset_root() / "rates").iterdir()):
        shutil.copy(bundled, workspace / bundled.name)
    return workspace


def run_evaluation(
    personas: list[Persona],
    scenarios: list[Scenario],
    reps: int = 1,
    mode: str = "scripted",
    out_dir: str | Path | None = None,
    live_config: AppConfig | None = None,
    annotator_enabled: bool = True,
    progress: Callable[[str], None] | None = None,
) -> dict[str, Any]:
    """Execute |personas| x |scenarios| x reps runs and aggregate them."""
    if mode not in ("scripted", "live"):
        raise ValueError("mode must be 'scripted' or 'live'")
    say = progress or (lambda text: None)
    out_path = Path(out_dir) if out_dir is not None else None

    if mode == "scripted":
        workspace_parent = out_path if out_path is not None else Path(".wattson_eval")
        workspace = prepare_workspace(workspace_parent / "workspace")
        home_config = asset_root() / "home" / "default_home.json"
        shared_knowledge = KnowledgeService(asset_root() / "corpus")
        shared_knowledge.build()
    else:
        if live_config is None:
            raise ValueError("live mode needs an AppConfig with real providers")
        workspace = live_config.data_dir
        home_config = live_config.home_config
        shared_knowledge = None

    ground_truth = compute_ground_truth(workspace, home_config)

    runs: list[dict] = []
    for scenario in scenarios:
        for persona in personas:
            for rep in range(reps):
                label = f"{scenario.name} x {persona.name} rep {rep + 1}"
                say(f"running {label}")
                try:
                    if mode == "scripted":
                        run = _scripted_run(
                            persona, scenario, rep, workspace, home_config, shared_knowledge
                        )
                    else:
                        run = _live_run(persona, scenario, rep, live_config)
                except Exception as exc:  # record, keep the batch going
                    run = _failed_run(persona, scenario, rep, exc)
                annotations = None
                if annotator_enabled and run.get("transcript"):
                    if mode == "live":
                        gateway = Gateway(live_config.cascade())
                        annotations = annotate_run_llm(
                            run["transcript"],
                            run["tool_log"],
                            gateway,
                            KNOWN_ENTITIES,
                            tuple(sorted(ground_truth)),
                        )
                    else:
                        annotations = annotate_run(
                            run["transcript"], run["tool_log"], KNOWN_ENTITIES
                        )
                run["metrics"] = compute_metrics(run, annotations, ground_truth)
                run["annotations"] = serialize_annotations(annotations)
                runs.append(run)

    scored = [r for r in runs if r["metrics"] is not None]
    if scored:
        aggregates = aggregate(scored)
    else:
        aggregates = {"runs": 0, "per_scenario": [], "per_persona": [], "overall": {}}
    batch = {
        "mode": mode,
        "personas": [p.name for p in personas],
        "scenarios": [s.name for s in scenarios],
        "reps": reps,
        "total_runs": len(runs),
        "runs": runs,
        "aggregates": aggregates,
    }
    if out_path is not None:
        _persist(batch, out_path)
        say(f"wrote report to {out_path}")
    return batch


# ── scripted mode ────────────────────────────────────────────────────────


def _scripted_run(
    persona: Persona,
    scenario: Scenario,
    rep: int,
    workspace: Path,
    home_config: Path,
    knowledge: KnowledgeService | None,
) -> dict[str, Any]:
    assets = asset_root()
    backend = PlannedBackend()
    virtual = VirtualTime()
    provider = ProviderConfig(name="planned", kind="planned")
    gateway = Gateway(
        ProviderCascade.of(provider),
        transports={"planned": backend},
        clock=virtual,
    )
    config = AppConfig(
        providers=[provider],
        data_dir=workspace,
        corpus_dir=assets / "corpus",
        home_config=home_config,
        prompts_dir=assets / "prompts",
    )
    run_key = f"{scenario.name}--{persona.name}--rep{rep + 1}"
    service = ChatService(
        config,
        gateway=gateway,
        time_fn=virtual,
        id_factory=lambda: f"eval-{run_key}",
        knowledge=knowledge,
        build_index=knowledge is None,
    )
    session = service.create_session()
    user = ScriptedUser(persona, scenario)
    return _drive(
        service,
        session.session_id,
        persona,
        scenario,
        rep,
        next_turn=user.next_turn,
        extend_plan=backend.extend,
        usage_fn=gateway.ledger.snapshot,
    )


def _live_run(persona: Persona, scenario: Scenario, rep: int, config: AppConfig) -> dict[str, Any]:
    gateway = Gateway(config.cascade())
    service = ChatService(config, gateway=gateway)
    session = service.create_session()
    transcript_view: list[dict] = []
    pending = {"confirmation": False}

    def next_turn(clarification_pending: bool = False):
        decision = simulate_user_turn(
            persona, scenario, transcript_view, gateway, pending["confirmation"]
        )
        action = decision.get("action")
        if action == "stop_goal_met":
            return StopSignal(reason="goal_met")
        if action == "stop_give_up":
            return StopSignal(reason="give_up")
        if action in ("approve", "deny"):
            return ScriptTurn(user_message=None, approve=action == "approve")
        return ScriptTurn(user_message=str(decision.get("message", "")) or "Go on.", plan=[])

    run = _drive(
        service,
        session.session_id,
        persona,
        scenario,
        rep,
        next_turn=next_turn,
        extend_plan=lambda items: None,
        usage_fn=gateway.ledger.snapshot,
        transcript_view=transcript_view,
        pending_flag=pending,
    )
    return run


# ── shared conversation driver ───────────────────────────────────────────


def _drive(
    service: ChatService,
    session_id: str,
    persona: Persona,
    scenario: Scenario,
    rep: int,
    next_turn: Callable[..., ScriptTurn | StopSignal],
    extend_plan: Callable[[list], None],
    usage_fn: Callable[[], dict],
    transcript_view: list[dict] | None = None,
    pending_flag: dict | None = None,
) -> dict[str, Any]:
    transcript: list[dict] = []
    events_log: list[dict] = []
    latencies: list[float] = []
    error_turns = 0
    turns_used = 0
    pending_confirmation: str | None = None
    clarification_pending = False
    stop_reason = "give_up"

    while True:
        step = next_turn(clarification_pending)
        if isinstance(step, StopSignal):
            stop_reason = step.reason
            break
        if turns_used >= scenario.max_turns:
            stop_reason = "budget_exhausted"
            break
        turns_used += 1
        clarification_pending = False

        if step.user_message is None:
            if pending_confirmation is None:
                stop_reason = "give_up"  # nothing to approve; treat as stuck
                break
            verb = "approve" if step.approve else "deny"
            transcript.append(
                {
                    "turn": turns_used,
                    "role": "user",
                    "content": f"[{verb} {pending_confirmation}]",
                    "synthetic": True,
                }
            )
            events = list(
                service.resolve_confirmation(session_id, pending_confirmation, step.approve)
            )
            pending_confirmation = None
        else:
            if step.plan:
                extend_plan(step.plan)
            transcript.append({"turn": turns_used, "role": "user", "content": step.user_message})
            events = list(service.post_message(session_id, step.user_message))

        events_log.append({"turn": turns_used, "events": [e.to_wire() for e in events]})
        turn_errored = False
        assistant_chunks: list[str] = []
        for event in events:
            if event.kind == "confirmation_request":
                pending_confirmation = event.payload["confirmation_id"]
                if pending_flag is not None:
                    pending_flag["confirmation"] = True
            elif event.kind == "clarification":
                clarification_pending = True
                assistant_chunks.append(event.payload["message"])
            elif event.kind == "token":
                assistant_chunks.append(event.payload["text"])
            elif event.kind == "error":
                turn_errored = True
                latencies.append(float(event.payload.get("latency", 0.0)))
            elif event.kind == "done":
                latencies.append(float(event.payload["latency"]))
        if turn_errored:
            error_turns += 1
        transcript.append(
            {
                "turn": turns_used,
                "role": "assistant",
                "content": "".join(assistant_chunks),
                "error": turn_errored,
            }
        )
        if pending_flag is not None and pending_confirmation is None:
            pending_flag["confirmation"] = False
        if transcript_view is not None:
            transcript_view.clear()
            transcript_view.extend(transcript)

    history = service.get_history(session_id)
    return {
        "persona": persona.name,
        "scenario": scenario.name,
        "rep": rep + 1,
        "target_agent": scenario.target_agent.value,
        "is_control": scenario.is_control,
        "max_turns": scenario.max_turns,
        "goal_achieved": stop_reason == "goal_met",
        "stop_reason": stop_reason,
        "turns_used": turns_used,
        "error_turns": error_turns,
        "transcript": transcript,
        "events": events_log,
        "tool_log": _tool_log(history),
        "turn_latencies": latencies,
        "routing": history["routing"],
        "steps": history["steps"],
        "usage": usage_fn(),
        "annotations": None,
        "metrics": None,
    }


def _tool_log(history: dict) -> list[dict]:
    log: list[dict] = []
    for turn_entry in history["steps"]:
        steps = turn_entry["steps"]
        for index, step in enumerate(steps):
            if step["kind"] == "tool_call":
                entry: dict[str, Any] = {
                    "turn": turn_entry["turn"],
                    "tool": step["payload"]["tool"],
                    "arguments": step["payload"].get("arguments", {}),
                    "is_error": False,
                    "status": None,
                    "confirmation_id": None,
                    "content": None,
                }
                if index + 1 < len(steps) and steps[index + 1]["kind"] == "tool_result":
                    result = steps[index + 1]["payload"]
                    entry["is_error"] = bool(result.get("is_error"))
                    content = result.get("content")
                    entry["content"] = content
                    if isinstance(content, dict):
                        entry["status"] = content.get("status")
                        entry["confirmation_id"] = content.get("confirmation_id")
                log.append(entry)
            elif step["kind"] == "tool_result" and step["payload"].get("tool") == "confirm_action":
                content = step["payload"].get("content")
                log.append(
                    {
                        "turn": turn_entry["turn"],
                        "tool": "confirm_action",
                        "arguments": {},
                        "is_error": bool(step["payload"].get("is_error")),
                        "status": content.get("status") if isinstance(content, dict) else None,
                        "confirmation_id": content.get("confirmation_id") if isinstance(content, dict) else None,
                        "content": content,
                    }
                )
    return log


def _failed_run(persona: Persona, scenario: Scenario, rep: int, exc: Exception) -> dict[str, Any]:
    return {
        "persona": persona.name,
        "scenario": scenario.name,
        "rep": rep + 1,
        "target_agent": scenario.target_agent.value,
        "is_control": scenario.is_control,
        "max_turns": scenario.max_turns,
        "goal_achieved": False,
        "stop_reason": f"error: {exc}",
        "turns_used": 0,
        "error_turns": 0,
        "transcript": [],
        "events": [],
        "tool_log": [],
        "turn_latencies": [],
        "routing": [],
        "steps": [],
        "usage": {
            "total_input_tokens": 0,
            "total_output_tokens": 0,
            "total_cost_usd": 0.0,
            "call_count": 0,
        },
        "annotations": None,
        "metrics": None,
    }


# ── persistence ──────────────────────────────────────────────────────────


def _persist(batch: dict[str, Any], out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    runs_dir = out_dir / "runs"
    runs_dir.mkdir(exist_ok=True)
    for run in batch["runs"]:
        name = f"{run['scenario']}--{run['persona']}--rep{run['rep']}.json"
        (runs_dir / name).write_text(_stable_json(run), encoding="utf-8")
    report = {
        "mode": batch["mode"],
        "personas": batch["personas"],
        "scenarios": batch["scenarios"],
        "reps": batch["reps"],
        "total_runs": batch["total_runs"],
        "aggregates": batch["aggregates"],
        "run_index": [
            {
                "scenario": run["scenario"],
                "persona": run["persona"],
                "rep": run["rep"],
                "goal_achieved": run["goal_achieved"],
                "turns_used": run["turns_used"],
                "metrics": run["metrics"],
            }
            for run in batch["runs"]
        ],
    }
    (out_dir / "report.json").write_text(_stable_json(report), encoding="utf-8")
    write_tables(batch["aggregates"], out_dir / "tables")
    render_figures(batch["aggregates"], out_dir / "figures")


def _stable_json(document: dict) -> str:
    return json.dumps(document, indent=2, sort_keys=True, default=_json_default) + "\n"


def _json_default(value: Any):
    if value == float("inf"):
        return "inf"
    return str(value)
