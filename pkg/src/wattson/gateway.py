"""Provider-agnostic chat-completion client with ordered cascading fallback.

A cascade is an ordered list of providers. Each call tries providers in
order: one attempt per provider (plus one repair retry when structured
output fails validation) before falling through to the next. Token usage
and dollar cost are accumulated in a thread-safe ledger.

Two transports ship by default:

* ``http`` — OpenAI-compatible chat-completions endpoint (covers OpenAI,
  Ollama, and most gateway proxies).
* ``scripted`` — replays canned responses from a JSON-lines fixture (one
  entry per request, in order), so every test runs without network or
  credentials.

Additional transports can be registered per gateway instance, keyed by
``ProviderConfig.kind``.
"""

from __future__ import annotations

import json
import os
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Sequence

import httpx
import jsonschema

from wattson.tools import ToolCall, ToolSpec

DEFAULT_TIMEOUT_SECONDS = 60.0


class GatewayError(Exception):
    """Base class for gateway failures."""


class AllProvidersFailed(GatewayError):
    """Every provider in the cascade failed; carries per-provider reasons."""

    def __init__(self, failures: list[tuple[str, str]]):
        self.failures = failures
        detail = "; ".join(f"{name}: {reason}" for name, reason in failures)
        super().__init__(f"all {len(failures)} provider attempt(s) failed: {detail}")


class SchemaViolation(GatewayError):
    """Structured output failed schema validation after retries exhausted the cascade."""

    def __init__(self, failures: list[tuple[str, str]]):
        self.failures = failures
        detail = "; ".join(f"{name}: {reason}" for name, reason in failures)
        super().__init__(f"structured output invalid after exhausting cascade: {detail}")


class ProviderError(GatewayError):
    """A single provider attempt failed (transport, HTTP, or fixture error)."""


@dataclass(frozen=True)
class ProviderConfig:
    """One provider in a cascade.

    ``kind`` selects the transport. Remote providers resolve their API key
    from the environment variable named by ``credential_ref``. Scripted
    providers read ``fixture_path`` (JSON lines) instead.
    """

    name: str
    kind: str = "http"
    endpoint: str = ""
    model: str = ""
    credential_ref: str = ""
    price_in: float = 0.0
    price_out: float = 0.0
    timeout: float = DEFAULT_TIMEOUT_SECONDS
    fixture_path: str | None = None

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("provider name must be nonempty")
        if self.timeout <= 0:
            raise ValueError(f"provider {self.name}: timeout must be > 0")
        if self.price_in < 0 or self.price_out < 0:
            raise ValueError(f"provider {self.name}: prices must be >= 0")
        if self.kind == "http" and not self.credential_ref:
            raise ValueError(f"provider {self.name}: remote providers need a credential_ref")


@dataclass(frozen=True)
class ProviderCascade:
    """Ordered fallback list; first entry is the primary provider."""

    providers: tuple[ProviderConfig, ...]

    def __post_init__(self) -> None:
        if not self.providers:
            raise ValueError("cascade must contain at least one provider")
        names = [p.name for p in self.providers]
        if len(set(names)) != len(names):
            raise ValueError(f"provider names must be unique, got {names}")

    @classmethod
    def of(cls, *providers: ProviderConfig) -> "ProviderCascade":
        return cls(providers=tuple(providers))


@dataclass(frozen=True)
class Message:
    role: str  # system | user | assistant | tool
    content: str = ""
    tool_calls: tuple[ToolCall, ...] = ()
    tool_call_id: str | None = None

    def __post_init__(self) -> None:
        if self.role not in ("system", "user", "assistant", "tool"):
            raise ValueError(f"unknown message role {self.role!r}")


@dataclass(frozen=True)
class ChatRequest:
    messages: tuple[Message, ...]
    tool_specs: tuple[ToolSpec, ...] = ()
    output_schema: dict[str, Any] | None = None
    temperature: float = 0.2

    def __post_init__(self) -> None:
        if not self.messages:
            raise ValueError("messages must be nonempty")
        first = next((m for m in self.messages if m.role != "tool"), None)
        if first is None or first.role not in ("system", "user"):
            raise ValueError("first non-tool message must be system or user")
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError("temperature must lie in [0, 2]")


@dataclass(frozen=True)
class Usage:
    input_tokens: int = 0
    output_tokens: int = 0

    def __post_init__(self) -> None:
        if self.input_tokens < 0 or self.output_tokens < 0:
            raise ValueError("token counts must be >= 0")


@dataclass(frozen=True)
class ChatResponse:
    kind: str  # text | tool_calls | structured
    content: str | dict[str, Any] | None
    tool_calls: tuple[ToolCall, ...]
    usage: Usage
    provider_used: str
    fallback_count: int
    latency: float

    @property
    def text(self) -> str:
        return self.content if isinstance(self.content, str) else json.dumps(self.content)


class UsageLedger:
    """Per-run accumulator of tokens, cost, and call count.

    Totals are monotone non-decreasing; each update is applied under a lock
    so concurrent sessions can share one ledger.
    """

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self.total_input_tokens = 0
        self.total_output_tokens = 0
        self.total_cost_usd = 0.0
        self.call_count = 0

    def record(self, usage: Usage, provider: ProviderConfig) -> None:
        cost = estimate_cost(usage, provider)
        with self._lock:
            self.total_input_tokens += usage.input_tokens
            self.total_output_tokens += usage.output_tokens
            self.total_cost_usd += cost
            self.call_count += 1

    def snapshot(self) -> dict[str, Any]:
        with self._lock:
            return {
                "total_input_tokens": self.total_input_tokens,
                "total_output_tokens": self.total_output_tokens,
                "total_cost_usd": self.total_cost_usd,
                "call_count": self.call_count,
            }


def estimate_cost(usage: Usage, provider: ProviderConfig) -> float:
    """Dollar cost of one call: (in * price_in + out * price_out) / 1e6."""
    return (usage.input_tokens * provider.price_in + usage.output_tokens * provider.price_out) / 1_000_000


def _approx_tokens(text: str) -> int:
    # Fixture entries rarely carry usage; ~4 chars/token is close enough
    # for ledger additivity tests.
    return max(1, len(text) // 4)


class _ScriptReader:
    """Sequential replay of fixture entries for one scripted provider."""

    def __init__(self, entries: Sequence[dict[str, Any]]):
        self._entries = list(entries)
        self._pos = 0
        self._lock = threading.Lock()

    @classmethod
    def from_path(cls, path: str | Path) -> "_ScriptReader":
        lines = Path(path).read_text(encoding="utf-8").splitlines()
        return cls([json.loads(line) for line in lines if line.strip()])

    def next(self) -> dict[str, Any]:
        with self._lock:
            if self._pos >= len(self._entries):
                raise ProviderError("scripted fixture exhausted")
            entry = self._entries[self._pos]
            self._pos += 1
            return entry


RawResult = dict[str, Any]
Transport = Callable[[ProviderConfig, ChatRequest], RawResult]


class Gateway:
    """Chat-completion client over a provider cascade.

    Safe for concurrent calls from many sessions: per-call state is local,
    ledger updates are atomic, and scripted replay advances under a lock.
    """

    def __init__(
        self,
        cascade: ProviderCascade,
        ledger: UsageLedger | None = None,
        transports: dict[str, Transport] | None = None,
        scripted_responses: dict[str, Sequence[dict[str, Any]]] | None = None,
        http_client: httpx.Client | None = None,
        clock: Callable[[], float] = time.monotonic,
    ) -> None:
        self.cascade = cascade
        self.clock = clock
        self.ledger = ledger if ledger is not None else UsageLedger()
        self._transports: dict[str, Transport] = {
            "http": self._http_transport,
            "scripted": self._scripted_transport,
        }
        if transports:
            self._transports.update(transports)
        self._scripts: dict[str, _ScriptReader] = {}
        for provider in cascade.providers:
            if provider.kind != "scripted":
                continue
            if scripted_responses and provider.name in scripted_responses:
                self._scripts[provider.name] = _ScriptReader(scripted_responses[provider.name])
            elif provider.fixture_path:
                self._scripts[provider.name] = _ScriptReader.from_path(provider.fixture_path)
            else:
                raise ValueError(f"scripted provider {provider.name} has no fixture")
        self._http = http_client

    # ── public API ──────────────────────────────────────────────────────

    def complete(self, request: ChatRequest) -> ChatResponse:
        """Return the response from the first provider that succeeds, in cascade order.

        Raises AllProvidersFailed when every attempt fails at the transport
        level, or SchemaViolation when structured output was requested and
        no provider produced a schema-valid document.
        """
        failures: list[tuple[str, str]] = []
        schema_failed = False
        for index, provider in enumerate(self.cascade.providers):
            started = self.clock()
            try:
                raw = self._attempt(provider, request)
            except ProviderError as exc:
                failures.append((provider.name, str(exc)))
                continue
            except SchemaViolation as exc:
                schema_failed = True
                failures.append((provider.name, str(exc)))
                continue
            latency = self.clock() - started
            return self._finalize(raw, request, provider, index, latency)
        if schema_failed:
            raise SchemaViolation(failures)
        raise AllProvidersFailed(failures)

    def complete_structured(self, request: ChatRequest) -> ChatResponse:
        """complete() for requests that must yield a schema-valid document."""
        if request.output_schema is None:
            raise ValueError("complete_structured requires request.output_schema")
        return self.complete(request)

    def provider_names(self) -> list[str]:
        return [p.name for p in self.cascade.providers]

    # ── per-provider attempt ────────────────────────────────────────────

    def _attempt(self, provider: ProviderConfig, request: ChatRequest) -> RawResult:
        transport = self._transports.get(provider.kind)
        if transport is None:
            raise ProviderError(f"no transport registered for kind {provider.kind!r}")
        raw = transport(provider, request)
        if request.output_schema is None:
            return raw
        error = self._structured_error(raw, request.output_schema)
        if error is None:
            return raw
        # One automatic repair retry on the same provider before falling
        # through the cascade.
        repair = self._with_repair_message(request, error)
        raw = transport(provider, repair)
        error = self._structured_error(raw, request.output_schema)
        if error is None:
            return raw
        raise SchemaViolation([(provider.name, error)])

    @staticmethod
    def _with_repair_message(request: ChatRequest, error: str) -> ChatRequest:
        note = Message(
            role="user",
            content=(
                "The previous reply was not a valid JSON document for the required "
                f"schema ({error}). Reply again with ONLY a valid JSON document."
            ),
        )
        return ChatRequest(
            messages=request.messages + (note,),
            tool_specs=request.tool_specs,
            output_schema=request.output_schema,
            temperature=request.temperature,
        )

    @staticmethod
    def _structured_error(raw: RawResult, schema: dict[str, Any]) -> str | None:
        """Validate a raw result against the request schema; None when valid.

        Mutates raw in place to carry the parsed document under "structured".
        """
        document = raw.get("structured")
        if document is None:
            text = raw.get("content")
            if not isinstance(text, str):
                return "response carried no document or text content"
            try:
                document = json.loads(_strip_code_fences(text))
            except json.JSONDecodeError as exc:
                return f"not parseable as JSON: {exc}"
        try:
            jsonschema.validate(document, schema)
        except jsonschema.ValidationError as exc:
            return f"schema validation failed: {exc.message}"
        raw["structured"] = document
        return None

    def _finalize(
        self,
        raw: RawResult,
        request: ChatRequest,
        provider: ProviderConfig,
        index: int,
        latency: float,
    ) -> ChatResponse:
        usage_raw = raw.get("usage") or {}
        usage = Usage(
            input_tokens=int(usage_raw.get("input_tokens", _approx_tokens(_rendered_length(request)))),
            output_tokens=int(usage_raw.get("output_tokens", _approx_tokens(str(raw.get("content") or raw.get("structured") or raw.get("tool_calls") or "")))),
        )
        self.ledger.record(usage, provider)
        if request.output_schema is not None:
            kind = "structured"
            content: str | dict[str, Any] | None = raw["structured"]
            calls: tuple[ToolCall, ...] = ()
        elif raw.get("tool_calls"):
            kind = "tool_calls"
            content = raw.get("content") or ""
            calls = tuple(
                ToolCall(tool=c["tool"], arguments=dict(c.get("arguments") or {}))
                for c in raw["tool_calls"]
            )
        else:
            kind = "text"
            content = raw.get("content") or ""
            calls = ()
        return ChatResponse(
            kind=kind,
            content=content,
            tool_calls=calls,
            usage=usage,
            provider_used=provider.name,
            fallback_count=index,
            latency=latency,
        )

    # ── transports ──────────────────────────────────────────────────────

    def _scripted_transport(self, provider: ProviderConfig, request: ChatRequest) -> RawResult:
        entry = self._scripts[provider.name].next()
        if "error" in entry:
            raise ProviderError(str(entry["error"]))
        return dict(entry)

    def _http_transport(self, provider: ProviderConfig, request: ChatRequest) -> RawResult:
        key = os.environ.get(provider.credential_ref, "")
        if not key:
            raise ProviderError(f"credential {provider.credential_ref} not set")
        body: dict[str, Any] = {
            "model": provider.model,
            "messages": [_wire_message(m) for m in request.messages],
            "temperature": request.temperature,
        }
        if request.tool_specs:
            body["tools"] = [_wire_tool(t) for t in request.tool_specs]
        if request.output_schema is not None:
            body["response_format"] = {"type": "json_object"}
            schema_note = (
                "Respond with a single JSON document matching this JSON Schema:\n"
                + json.dumps(request.output_schema)
            )
            body["messages"] = [{"role": "system", "content": schema_note}] + body["messages"]
        client = self._http or httpx.Client()
        try:
            response = client.post(
                provider.endpoint,
                json=body,
                headers={"Authorization": f"Bearer {key}"},
                timeout=provider.timeout,
            )
        except httpx.HTTPError as exc:
            raise ProviderError(f"transport error: {exc}") from exc
        finally:
            if self._http is None:
                client.close()
        if response.status_code != 200:
            raise ProviderError(f"HTTP {response.status_code}: {response.text[:200]}")
        try:
            data = response.json()
            message = data["choices"][0]["message"]
        except (KeyError, IndexError, ValueError) as exc:
            raise ProviderError(f"malformed completion body: {exc}") from exc
        usage = data.get("usage") or {}
        raw: RawResult = {
            "usage": {
                "input_tokens": usage.get("prompt_tokens", 0),
                "output_tokens": usage.get("completion_tokens", 0),
            }
        }
        wire_calls = message.get("tool_calls") or []
        if wire_calls:
            calls = []
            for call in wire_calls:
                fn = call.get("function", {})
                try:
                    arguments = json.loads(fn.get("arguments") or "{}")
                except json.JSONDecodeError:
                    arguments = {}
                calls.append({"tool": fn.get("name", ""), "arguments": arguments})
            raw["tool_calls"] = calls
            raw["content"] = message.get("content") or ""
        else:
            raw["content"] = message.get("content") or ""
        return raw


def _strip_code_fences(text: str) -> str:
    stripped = text.strip()
    if stripped.startswith("```"):
        stripped = stripped.split("\n", 1)[-1]
        if stripped.endswith("```"):
            stripped = stripped[: -len("```")]
    return stripped.strip()


def _rendered_length(request: ChatRequest) -> str:
    return "".join(m.content for m in request.messages)


def _wire_message(message: Message) -> dict[str, Any]:
    wire: dict[str, Any] = {"role": message.role, "content": message.content}
    if message.tool_calls:
        wire["tool_calls"] = [
            {
                "id": f"call_{i}",
                "type": "function",
                "function": {"name": c.tool, "arguments": json.dumps(c.arguments)},
            }
            for i, c in enumerate(message.tool_calls)
        ]
    if message.tool_call_id is not None:
        wire["tool_call_id"] = message.tool_call_id
    return wire


def _wire_tool(spec: ToolSpec) -> dict[str, Any]:
    return {
        "type": "function",
        "function": {
            "name": spec.name,
            "description": spec.description,
            "parameters": spec.json_schema(),
        },
    }
