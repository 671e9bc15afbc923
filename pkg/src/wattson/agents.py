"""Shared reasoning loop for the three specialized agents.

One turn: reason, invoke a tool, observe the result, repeat until the
model synthesizes a final answer or the per-turn tool budget runs out
(at which point it is forced to synthesize from what it has). Tool
failures are fed back as observations rather than aborting the turn.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Sequence

from wattson.gateway import ChatRequest, Gateway, Message
from wattson.routing import AgentKind
from wattson.tools import ToolCall, ToolRegistry, execute_tool

DEFAULT_MAX_STEPS = 12  # tool calls allowed per user turn
AGENT_TEMPERATURE = 0.2  # tool-argument stability

STEP_KINDS = ("reasoning", "tool_call", "tool_result", "final")


class MissingAsset(Exception):
    """A prompt asset file is absent."""


def load_prompt_asset(path: str | Path) -> str:
    """Return the prompt file contents verbatim."""
    asset = Path(path)
    if not asset.is_file():
        raise MissingAsset(f"prompt asset not found: {asset}")
    return asset.read_text(encoding="utf-8")


@dataclass(frozen=True)
class AgentStep:
    kind: str
    payload: dict[str, Any]
    timestamp: float
    latency: float | None = None  # model-backed steps only

    def __post_init__(self) -> None:
        if self.kind not in STEP_KINDS:
            raise ValueError(f"unknown step kind {self.kind!r}")


@dataclass
class AgentTranscript:
    agent: AgentKind
    steps: list[AgentStep] = field(default_factory=list)

    @property
    def final_text(self) -> str:
        for step in reversed(self.steps):
            if step.kind == "final":
                return step.payload["text"]
        return ""

    @property
    def tool_call_count(self) -> int:
        return sum(1 for s in self.steps if s.kind == "tool_call")


@dataclass
class AgentConfig:
    kind: AgentKind
    prompt_path: Path
    registry: ToolRegistry
    max_steps: int = DEFAULT_MAX_STEPS

    def __post_init__(self) -> None:
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")


EventCallback = Callable[[str, dict[str, Any]], None]

BUDGET_NOTE = (
    "You have reached the tool budget for this turn. Synthesize your best "
    "final answer now from the observations above; do not call more tools."
)


def run_agent(
    config: AgentConfig,
    gateway: Gateway,
    history: Sequence[Message],
    user_message: str,
    on_event: EventCallback | None = None,
    time_fn: Callable[[], float] = time.time,
) -> AgentTranscript:
    """Execute one user turn through the reasoning loop.

    The transcript always ends with a ``final`` step. Gateway failures
    propagate to the caller, which renders them as a user-visible error
    turn.
    """
    transcript = AgentTranscript(agent=config.kind)
    emit = on_event or (lambda kind, payload: None)
    system_prompt = load_prompt_asset(config.prompt_path)
    messages: list[Message] = [Message(role="system", content=system_prompt)]
    messages.extend(history)
    messages.append(Message(role="user", content=user_message))

    steps_used = 0
    forced = False
    while True:
        offer_tools = not forced and steps_used < config.max_steps
        request = ChatRequest(
            messages=tuple(messages),
            tool_specs=config.registry.specs() if offer_tools else (),
            temperature=AGENT_TEMPERATURE,
        )
        response = gateway.complete(request)

        if response.kind == "tool_calls" and offer_tools:
            if isinstance(response.content, str) and response.content.strip():
                transcript.steps.append(
                    AgentStep(
                        kind="reasoning",
                        payload={"text": response.content},
                        timestamp=time_fn(),
                        latency=response.latency,
                    )
                )
            messages.append(
                Message(role="assistant", content=response.content or "", tool_calls=response.tool_calls)
            )
            for position, call in enumerate(response.tool_calls):
                call_id = f"call_{steps_used}_{position}"
                if steps_used >= config.max_steps:
                    # Budget ran out mid-batch: answer the protocol message
                    # without recording a step, the call never executed.
                    messages.append(
                        Message(role="tool", content="skipped: tool budget exhausted", tool_call_id=call_id)
                    )
                    continue
                steps_used += 1
                transcript.steps.append(
                    AgentStep(
                        kind="tool_call",
                        payload={"tool": call.tool, "arguments": call.arguments},
                        timestamp=time_fn(),
                    )
                )
                emit("tool_call", {"tool": call.tool, "arguments": call.arguments})
                result = execute_tool(config.registry, ToolCall(tool=call.tool, arguments=call.arguments))
                transcript.steps.append(
                    AgentStep(
                        kind="tool_result",
                        payload={"tool": call.tool, "content": result.content, "is_error": result.is_error},
                        timestamp=time_fn(),
                    )
                )
                emit("tool_result", {"tool": call.tool, "content": result.content, "is_error": result.is_error})
                messages.append(Message(role="tool", content=result.as_text(), tool_call_id=call_id))
            if steps_used >= config.max_steps:
                forced = True
                messages.append(Message(role="user", content=BUDGET_NOTE))
            continue

        # A response without executable tool calls ends the turn. If the
        # model ignored the forced-synthesis instruction, its text content
        # still stands in as the final answer.
        text = response.content if isinstance(response.content, str) else ""
        if not text.strip() and forced:
            text = "I ran out of tool budget for this turn; here is what I found so far."
        transcript.steps.append(
            AgentStep(
                kind="final",
                payload={"text": text},
                timestamp=time_fn(),
                latency=response.latency,
            )
        )
        return transcript
