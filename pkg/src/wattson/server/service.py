"""Message processing: session lifecycle, routing, agent runs, streaming.

One service instance owns the gateway, the shared knowledge index, and
the weather client; each session gets its own analytics engine and
simulated home. Message processing is serialized per session (a second
concurrent message receives Busy), and every response is a stream of
sequence-numbered events ending in exactly one terminal event (done or
error).
"""

from __future__ import annotations

import queue
import secrets
import threading
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Iterator

from wattson.agents import AgentConfig, AgentTranscript, run_agent
from wattson.analytics.engine import AnalyticsEngine
from wattson.analytics.tools import build_analysis_registry
from wattson.devices.home import SmartHome, load_home_config
from wattson.devices.tools import build_control_registry
from wattson.gateway import Gateway, GatewayError, Message
from wattson.knowledge.service import KnowledgeService
from wattson.knowledge.tools import build_knowledge_registry
from wattson.knowledge.weather import WeatherClient
from wattson.routing import (
    AgentKind,
    Clarify,
    Route,
    RoutingDecision,
    build_clarification,
    classify,
)
from wattson.server.config import AppConfig
from wattson.server.sessions import SessionStore

TOKEN_CHUNK_CHARS = 48
AGENT_HISTORY_WINDOW = 12  # prior messages shown to the agent


class UnknownSession(Exception):
    pass


class Busy(Exception):
    pass


@dataclass(frozen=True)
class StreamEvent:
    kind: str  # routing | token | tool_call | tool_result | clarification | confirmation_request | error | done
    seq: int
    payload: dict[str, Any]

    def to_wire(self) -> dict[str, Any]:
        return {"kind": self.kind, "seq": self.seq, "payload": self.payload}


@dataclass
class Session:
    session_id: str
    created_at: float
    engine: AnalyticsEngine
    home: SmartHome
    agent_configs: dict[AgentKind, AgentConfig]
    messages: list[dict] = field(default_factory=list)
    routing_log: list[dict] = field(default_factory=list)
    steps_log: list[dict] = field(default_factory=list)
    pending_clarification: list[str] | None = None
    turn_count: int = 0
    lock: threading.Lock = field(default_factory=threading.Lock)

    def record(self) -> dict:
        return {
            "session_id": self.session_id,
            "created_at": self.created_at,
            "messages": self.messages,
            "routing": self.routing_log,
            "steps": self.steps_log,
            "turn_count": self.turn_count,
        }


class ChatService:
    def __init__(
        self,
        config: AppConfig,
        gateway: Gateway | None = None,
        store: SessionStore | None = None,
        time_fn: Callable[[], float] = time.time,
        id_factory: Callable[[], str] | None = None,
        build_index: bool = True,
        knowledge: KnowledgeService | None = None,
    ) -> None:
        self.config = config
        self.gateway = gateway if gateway is not None else Gateway(config.cascade())
        self.store = store if store is not None else SessionStore(config.persistence_path)
        self.time_fn = time_fn
        self._id_factory = id_factory or (lambda: secrets.token_urlsafe(16))
        self.knowledge = knowledge if knowledge is not None else KnowledgeService(config.corpus_dir)
        if build_index and self.knowledge.index is None:
            try:
                self.knowledge.build()
            except Exception:
                pass  # health() reports the index as not built
        self.weather = WeatherClient(
            mode=config.weather_mode,
            fixture_dir=config.weather_fixture_dir,
            default_location=config.default_location,
            locations=config.weather_locations,
        )
        self._classifier_prompt = (config.prompts_dir / "router.md").read_text(encoding="utf-8")
        self._sessions: dict[str, Session] = {}
        self._sessions_lock = threading.Lock()

    # ── session lifecycle ───────────────────────────────────────────────

    def create_session(self) -> Session:
        session = self._new_session(self._id_factory())
        self.store.save(session.record())
        return session

    def get_session(self, session_id: str) -> Session:
        with self._sessions_lock:
            session = self._sessions.get(session_id)
        if session is not None:
            return session
        record = self.store.load(session_id)
        if record is None:
            raise UnknownSession(f"no session {session_id!r}")
        session = self._new_session(session_id)
        session.created_at = record["created_at"]
        session.messages = record["messages"]
        session.routing_log = record["routing"]
        session.steps_log = record["steps"]
        session.turn_count = record.get("turn_count", 0)
        return session

    def _new_session(self, session_id: str) -> Session:
        engine = AnalyticsEngine(self.config.data_dir)
        home = load_home_config(self.config.home_config)
        configs = {
            AgentKind.ANALYSIS: AgentConfig(
                kind=AgentKind.ANALYSIS,
                prompt_path=self.config.prompts_dir / "analysis.md",
                registry=build_analysis_registry(engine),
            ),
            AgentKind.KNOWLEDGE: AgentConfig(
                kind=AgentKind.KNOWLEDGE,
                prompt_path=self.config.prompts_dir / "knowledge.md",
                registry=build_knowledge_registry(self.knowledge, self.weather, engine),
            ),
            AgentKind.CONTROL: AgentConfig(
                kind=AgentKind.CONTROL,
                prompt_path=self.config.prompts_dir / "control.md",
                registry=build_control_registry(home, engine, self.weather),
            ),
        }
        session = Session(
            session_id=session_id,
            created_at=self.time_fn(),
            engine=engine,
            home=home,
            agent_configs=configs,
        )
        with self._sessions_lock:
            self._sessions[session_id] = session
        return session

    # ── message processing ──────────────────────────────────────────────

    def post_message(self, session_id: str, content: str) -> Iterator[StreamEvent]:
        if not content or not content.strip():
            raise ValueError("message content must be nonempty")
        session = self.get_session(session_id)
        if not session.lock.acquire(blocking=False):
            raise Busy(f"session {session_id} is already processing a message")
        return self._stream_turn(session, content)

    def resolve_confirmation(
        self, session_id: str, confirmation_id: str, approved: bool
    ) -> Iterator[StreamEvent]:
        session = self.get_session(session_id)
        if not session.lock.acquire(blocking=False):
            raise Busy(f"session {session_id} is already processing a message")
        return self._stream_confirmation(session, confirmation_id, approved)

    def get_history(self, session_id: str) -> dict:
        session = self.get_session(session_id)
        return session.record()

    def health(self) -> dict:
        index = self.knowledge.status()
        csv_files = (
            sorted(p.name for p in self.config.data_dir.glob("*.csv"))
            if self.config.data_dir.is_dir()
            else []
        )
        return {
            "status": "ok",
            "providers": [
                {"name": p.name, "kind": p.kind} for p in self.gateway.cascade.providers
            ],
            "index": {
                "status": "built" if index["built"] else "not built",
                "documents": index["documents"],
                "chunks": index["chunks"],
            },
            "dataset": {
                "data_dir": str(self.config.data_dir),
                "energy_files": csv_files,
            },
            "usage": self.gateway.ledger.snapshot(),
        }

    # ── turn processing internals ───────────────────────────────────────

    def _stream_turn(self, session: Session, content: str) -> Iterator[StreamEvent]:
        try:
            turn = session.turn_count + 1
            session.turn_count = turn
            started = self.time_fn()
            seq = 0

            def event(kind: str, payload: dict) -> StreamEvent:
                nonlocal seq
                item = StreamEvent(kind=kind, seq=seq, payload=payload)
                seq += 1
                return item

            session.messages.append(
                {"role": "user", "content": content, "timestamp": self.time_fn()}
            )

            decision = None
            selected = self._clarification_selection(session, content)
            if selected is not None:
                routing_payload = {
                    "outcome": {"route": selected.value},
                    "bypass": True,
                    "attempts": [],
                    "tally": None,
                }
                session.pending_clarification = None
            else:
                session.pending_clarification = None
                try:
                    decision = self._classify(session, content)
                except GatewayError as exc:
                    yield event("error", {"turn": turn, "reason": str(exc)})
                    session.messages.append(
                        {
                            "role": "assistant",
                            "content": f"Something went wrong handling that message: {exc}",
                            "timestamp": self.time_fn(),
                            "error": True,
                        }
                    )
                    self.store.save(session.record())
                    return
                routing_payload = decision.to_payload()
            session.routing_log.append({"turn": turn, **routing_payload})
            yield event("routing", routing_payload)

            if decision is not None and isinstance(decision.outcome, Clarify):
                clarification = build_clarification(decision.outcome.options)
                session.pending_clarification = [o["agent"] for o in clarification["options"]]
                session.messages.append(
                    {
                        "role": "assistant",
                        "content": clarification["message"],
                        "timestamp": self.time_fn(),
                    }
                )
                yield event("clarification", clarification)
                self.store.save(session.record())
                yield event("done", {"turn": turn, "latency": self.time_fn() - started})
                return

            kind = selected if selected is not None else decision.outcome.agent  # type: ignore[union-attr]
            agent_config = session.agent_configs[kind]
            history = self._history_messages(session)

            items: "queue.Queue[tuple[str, Any, Any]]" = queue.Queue()

            def on_event(event_kind: str, payload: dict) -> None:
                items.put(("event", event_kind, payload))

            def worker() -> None:
                try:
                    result = run_agent(
                        agent_config,
                        self.gateway,
                        history,
                        content,
                        on_event=on_event,
                        time_fn=self.time_fn,
                    )
                    items.put(("finished", result, None))
                except Exception as exc:  # surfaced as a user-visible error turn
                    items.put(("failed", exc, None))

            thread = threading.Thread(target=worker, daemon=True)
            thread.start()

            transcript: AgentTranscript | None = None
            while True:
                tag, head, body = items.get()
                if tag == "event":
                    yield event(head, body if isinstance(body, dict) else {})
                    continue
                if tag == "finished":
                    transcript = head
                    break
                raise_exc = head
                yield event("error", {"turn": turn, "reason": str(raise_exc)})
                session.messages.append(
                    {
                        "role": "assistant",
                        "content": f"Something went wrong handling that message: {raise_exc}",
                        "timestamp": self.time_fn(),
                        "error": True,
                    }
                )
                self.store.save(session.record())
                return

            assert transcript is not None
            steps_payload = []
            for step in transcript.steps:
                steps_payload.append(
                    {
                        "kind": step.kind,
                        "payload": step.payload,
                        "timestamp": step.timestamp,
                        "latency": step.latency,
                    }
                )
            session.steps_log.append(
                {"turn": turn, "agent": kind.value, "steps": steps_payload}
            )

            for step in transcript.steps:
                if step.kind == "tool_result" and _is_confirmation(step.payload):
                    body = step.payload["content"]
                    yield event(
                        "confirmation_request",
                        {
                            "confirmation_id": body["confirmation_id"],
                            "summary": body["summary"],
                            "expires_at": body["expires_at"],
                        },
                    )

            final_text = transcript.final_text
            for piece in _token_chunks(final_text):
                yield event("token", {"text": piece})
            session.messages.append(
                {"role": "assistant", "content": final_text, "timestamp": self.time_fn()}
            )
            self.store.save(session.record())
            yield event("done", {"turn": turn, "latency": self.time_fn() - started})
        finally:
            session.lock.release()

    def _stream_confirmation(
        self, session: Session, confirmation_id: str, approved: bool
    ) -> Iterator[StreamEvent]:
        try:
            turn = session.turn_count + 1
            session.turn_count = turn
            started = self.time_fn()
            seq = 0

            def event(kind: str, payload: dict) -> StreamEvent:
                nonlocal seq
                item = StreamEvent(kind=kind, seq=seq, payload=payload)
                seq += 1
                return item

            try:
                outcome = session.home.confirm_action(confirmation_id, approved)
            except Exception as exc:
                yield event("error", {"turn": turn, "reason": str(exc)})
                self.store.save(session.record())
                return
            yield event(
                "tool_result",
                {"tool": "confirm_action", "content": outcome, "is_error": False},
            )
            session.steps_log.append(
                {
                    "turn": turn,
                    "agent": "control",
                    "steps": [
                        {
                            "kind": "tool_result",
                            "payload": {
                                "tool": "confirm_action",
                                "content": outcome,
                                "is_error": False,
                            },
                            "timestamp": self.time_fn(),
                            "latency": None,
                        }
                    ],
                }
            )
            if outcome["status"] == "executed":
                text = "Done - the change has been applied. " + _describe_changes(outcome)
            elif outcome["status"] == "scheduled":
                text = "Confirmed - the action is scheduled. " + _describe_changes(outcome)
            else:
                text = "Cancelled - no changes were made."
            for piece in _token_chunks(text):
                yield event("token", {"text": piece})
            session.messages.append(
                {"role": "assistant", "content": text, "timestamp": self.time_fn()}
            )
            self.store.save(session.record())
            yield event("done", {"turn": turn, "latency": self.time_fn() - started})
        finally:
            session.lock.release()

    def _classify(self, session: Session, content: str) -> RoutingDecision:
        history = self._history_messages(session)
        return classify(content, history, self.gateway, self._classifier_prompt)

    def _history_messages(self, session: Session) -> list[Message]:
        # Exclude the user message appended for the current turn.
        prior = session.messages[:-1] if session.messages else []
        window = prior[-AGENT_HISTORY_WINDOW:]
        return [
            Message(role=m["role"], content=m["content"])
            for m in window
            if m["role"] in ("user", "assistant")
        ]

    def _clarification_selection(self, session: Session, content: str) -> AgentKind | None:
        options = session.pending_clarification
        if not options:
            return None
        text = content.strip().lower()
        for index, option in enumerate(options, start=1):
            if text == option.lower() or text == str(index):
                return AgentKind(option)
        return None


def _is_confirmation(payload: dict) -> bool:
    content = payload.get("content")
    return (
        isinstance(content, dict)
        and content.get("status") == "confirmation_required"
        and not payload.get("is_error", False)
    )


def _token_chunks(text: str, size: int = TOKEN_CHUNK_CHARS) -> Iterator[str]:
    for start in range(0, len(text), size):
        yield text[start : start + size]


def _describe_changes(outcome: dict) -> str:
    result = outcome.get("result") or outcome.get("schedule") or {}
    changes = result.get("changes") or result.get("arguments") or {}
    if not changes:
        return ""
    rendered = ", ".join(f"{k} = {v}" for k, v in changes.items())
    return f"({rendered})"
