import json
import shutil
import threading

import pytest
from fastapi.testclient import TestClient

from wattson.gateway import Gateway, ProviderCascade, ProviderConfig
from wattson.server.app import create_app
from wattson.server.config import AppConfig, asset_root
from wattson.server.service import Busy, ChatService, UnknownSession
from wattson.server.sessions import SessionStore


def vote(agent: str) -> dict:
    return {"structured": {"agent": agent, "rationale": f"about {agent}"}}


@pytest.fixture()
def data_dir(tmp_path, workspace):
    target = tmp_path / "data"
    shutil.copytree(workspace, target)
    return target


def build_service(data_dir, responses, persistence=None, store=None) -> ChatService:
    assets = asset_root()
    provider = ProviderConfig(name="scripted", kind="scripted", fixture_path="inline")
    config = AppConfig(
        providers=[provider],
        data_dir=data_dir,
        corpus_dir=assets / "corpus",
        home_config=assets / "home" / "default_home.json",
        prompts_dir=assets / "prompts",
        persistence_path=persistence,
    )
    gateway = Gateway(ProviderCascade.of(provider), scripted_responses={"scripted": responses})
    return ChatService(config, gateway=gateway, store=store)


def parse_sse(text: str) -> list[dict]:
    events = []
    for block in text.strip().split("\n\n"):
        for line in block.splitlines():
            if line.startswith("data: "):
                events.append(json.loads(line[len("data: "):]))
    return events


ANALYSIS_TURN = [
    vote("analysis"), vote("analysis"), vote("analysis"), vote("analysis"),
    {"tool_calls": [{"tool": "load_energy_data", "arguments": {"path": "household.csv"}}]},
    {"content": "Loaded. Your data covers 90 days."},
]


# ── service-level behavior ──────────────────────────────────────────────


def test_session_ids_are_distinct_and_long(data_dir):
    service = build_service(data_dir, [])
    a = service.create_session().session_id
    b = service.create_session().session_id
    assert a != b
    assert len(a) >= 22 and len(b) >= 22


def test_new_session_history_empty(data_dir):
    service = build_service(data_dir, [])
    session = service.create_session()
    history = service.get_history(session.session_id)
    assert history["messages"] == []
    assert history["routing"] == []


def test_event_stream_shape(data_dir):
    service = build_service(data_dir, list(ANALYSIS_TURN))
    session = service.create_session()
    events = list(service.post_message(session.session_id, "Analyze my usage"))
    kinds = [e.kind for e in events]
    assert kinds[0] == "routing"
    assert "tool_call" in kinds and "tool_result" in kinds and "token" in kinds
    assert kinds[-1] == "done"
    assert kinds.count("done") + kinds.count("error") == 1
    seqs = [e.seq for e in events]
    assert seqs == sorted(seqs) and len(set(seqs)) == len(seqs)
    rendered = "".join(e.payload["text"] for e in events if e.kind == "token")
    assert rendered == "Loaded. Your data covers 90 days."


def test_tie_emits_clarification_then_done(data_dir):
    service = build_service(
        data_dir, [vote("analysis"), vote("analysis"), vote("knowledge"), vote("knowledge")]
    )
    session = service.create_session()
    events = list(service.post_message(session.session_id, "Help me with energy"))
    kinds = [e.kind for e in events]
    assert kinds == ["routing", "clarification", "done"]
    options = events[1].payload["options"]
    assert [o["agent"] for o in options] == ["analysis", "knowledge"]


def test_clarification_selection_bypasses_reclassification(data_dir):
    responses = [
        vote("analysis"), vote("analysis"), vote("knowledge"), vote("knowledge"),
        {"content": "Here is your energy answer."},  # agent turn after bypass
    ]
    service = build_service(data_dir, responses)
    session = service.create_session()
    list(service.post_message(session.session_id, "Help me with energy"))
    events = list(service.post_message(session.session_id, "analysis"))
    routing = events[0]
    assert routing.payload["bypass"] is True
    assert routing.payload["outcome"] == {"route": "analysis"}
    assert events[-1].kind == "done"


def test_unknown_session_raises(data_dir):
    service = build_service(data_dir, [])
    with pytest.raises(UnknownSession):
        service.post_message("nope", "hello")
    with pytest.raises(UnknownSession):
        service.get_history("nope")


def test_concurrent_messages_get_busy(data_dir):
    service = build_service(data_dir, list(ANALYSIS_TURN))
    session = service.create_session()
    stream = service.post_message(session.session_id, "Analyze my usage")
    next(stream)  # start processing; lock held
    with pytest.raises(Busy):
        service.post_message(session.session_id, "Another message")
    list(stream)  # drain
    # lock released; next turn would classify again (plan exhausted -> error event)
    events = list(service.post_message(session.session_id, "again"))
    assert events[-1].kind in ("done", "error")


def test_gateway_failure_becomes_error_event(data_dir):
    service = build_service(data_dir, [{"error": "provider down"}])
    session = service.create_session()
    events = list(service.post_message(session.session_id, "hello"))
    assert events[-1].kind == "error"
    assert "provider down" in events[-1].payload["reason"]
    history = service.get_history(session.session_id)
    assert history["messages"][-1]["error"] is True


def test_history_appends_only(data_dir):
    service = build_service(data_dir, list(ANALYSIS_TURN))
    session = service.create_session()
    list(service.post_message(session.session_id, "Analyze my usage"))
    first = json.dumps(service.get_history(session.session_id)["messages"][0])
    events = list(service.post_message(session.session_id, "and again?"))
    assert events[-1].kind == "error"  # scripted plan exhausted
    after = service.get_history(session.session_id)
    assert json.dumps(after["messages"][0]) == first
    assert len(after["messages"]) == 4  # 2 user + 2 assistant (incl. error turn)


def test_history_survives_restart_with_persistence(data_dir, tmp_path):
    db = tmp_path / "sessions.sqlite"
    service = build_service(data_dir, list(ANALYSIS_TURN), persistence=db)
    session = service.create_session()
    list(service.post_message(session.session_id, "Analyze my usage"))
    service.store.close()

    reborn = build_service(data_dir, [], store=SessionStore(db))
    history = reborn.get_history(session.session_id)
    assert len(history["messages"]) == 2
    assert history["messages"][0]["content"] == "Analyze my usage"
    assert history["steps"][0]["steps"][0]["kind"] == "tool_call"


def test_confirmation_flow_through_service(data_dir):
    responses = [
        vote("control"), vote("control"), vote("control"), vote("control"),
        {"tool_calls": [{"tool": "control_device", "arguments": {
            "device_id": "thermostat_main", "action": "set_temperature",
            "arguments": json.dumps({"setpoint_f": 78}),
        }}]},
        {"content": "Queued - approve to apply 78F."},
    ]
    service = build_service(data_dir, responses)
    session = service.create_session()
    events = list(service.post_message(session.session_id, "Set thermostat to 78"))
    kinds = [e.kind for e in events]
    assert "confirmation_request" in kinds
    confirmation_id = next(
        e.payload["confirmation_id"] for e in events if e.kind == "confirmation_request"
    )
    outcome_events = list(
        service.resolve_confirmation(session.session_id, confirmation_id, approved=True)
    )
    assert outcome_events[0].kind == "tool_result"
    assert outcome_events[0].payload["content"]["status"] == "executed"
    assert outcome_events[-1].kind == "done"
    runtime = service.get_session(session.session_id)
    status = runtime.home.get_device_status("thermostat_main")
    assert status["settings"]["setpoint_f"]["value"] == 78.0


def test_cross_session_confirmation_rejected(data_dir):
    responses = [
        vote("control"), vote("control"), vote("control"), vote("control"),
        {"tool_calls": [{"tool": "control_device", "arguments": {
            "device_id": "thermostat_main", "action": "set_temperature",
            "arguments": json.dumps({"setpoint_f": 78}),
        }}]},
        {"content": "Queued."},
    ]
    service = build_service(data_dir, responses)
    owner = service.create_session()
    events = list(service.post_message(owner.session_id, "Set thermostat to 78"))
    confirmation_id = next(
        e.payload["confirmation_id"] for e in events if e.kind == "confirmation_request"
    )
    intruder = service.create_session()
    outcome = list(service.resolve_confirmation(intruder.session_id, confirmation_id, True))
    assert outcome[-1].kind == "error"


# ── HTTP surface ────────────────────────────────────────────────────────


@pytest.fixture()
def client(data_dir):
    service = build_service(data_dir, list(ANALYSIS_TURN) + [
        vote("knowledge"), vote("knowledge"), vote("knowledge"), vote("knowledge"),
        {"content": "TOU rates price energy by hour."},
    ])
    return TestClient(create_app(service))


def test_http_session_and_message_roundtrip(client):
    session_id = client.post("/api/sessions").json()["session_id"]
    response = client.post(
        f"/api/sessions/{session_id}/messages", json={"content": "Analyze my usage"}
    )
    assert response.status_code == 200
    assert response.headers["content-type"].startswith("text/event-stream")
    events = parse_sse(response.text)
    assert events[0]["kind"] == "routing"
    assert events[-1]["kind"] == "done"
    seqs = [e["seq"] for e in events]
    assert seqs == sorted(seqs)

    history = client.get(f"/api/sessions/{session_id}/history").json()
    assert len(history["messages"]) == 2


def test_http_unknown_session_404(client):
    assert client.post("/api/sessions/ghost/messages", json={"content": "hi"}).status_code == 404
    assert client.get("/api/sessions/ghost/history").status_code == 404


def test_http_empty_message_422(client):
    session_id = client.post("/api/sessions").json()["session_id"]
    response = client.post(f"/api/sessions/{session_id}/messages", json={"content": "  "})
    assert response.status_code == 422


def test_http_health(client):
    body = client.get("/api/health").json()
    assert body["status"] == "ok"
    assert body["providers"][0]["kind"] == "scripted"
    assert body["index"]["status"] == "built"
    assert body["index"]["documents"] == 12
    assert "household.csv" in body["dataset"]["energy_files"]


def test_http_busy_409(data_dir):
    service = build_service(data_dir, list(ANALYSIS_TURN))
    app = create_app(service)
    session_id = service.create_session().session_id
    stream = service.post_message(session_id, "hold the lock")
    next(stream)
    with TestClient(app) as client:
        response = client.post(
            f"/api/sessions/{session_id}/messages", json={"content": "second"}
        )
        assert response.status_code == 409
    list(stream)
