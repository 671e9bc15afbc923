"""Self-consistency query classifier.

Each incoming query is classified four times with chain-of-thought
sampling (every attempt must produce a rationale alongside its label),
then the labels are tallied. A unique plurality routes directly; tied
maxima surface clarification options to the user instead of guessing.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from wattson.gateway import ChatRequest, Gateway, Message, SchemaViolation

logger = logging.getLogger(__name__)

ROUTER_TEMPERATURE = 0.8  # sampling diversity across the four attempts
ATTEMPT_COUNT = 4
HISTORY_WINDOW = 6  # most recent messages shown to the classifier


class AgentKind(str, Enum):
    ANALYSIS = "analysis"
    KNOWLEDGE = "knowledge"
    CONTROL = "control"


AGENT_CAPABILITIES: dict[AgentKind, str] = {
    AgentKind.ANALYSIS: "Analyze your energy data: consumption, costs, trends, and savings",
    AgentKind.KNOWLEDGE: "Explain energy concepts, rebates, efficiency programs, and weather impacts",
    AgentKind.CONTROL: "Check and control smart home devices, schedules, and automations",
}

CLASSIFIER_SCHEMA = {
    "type": "object",
    "properties": {
        "agent": {"type": "string", "enum": [k.value for k in AgentKind]},
        "rationale": {"type": "string", "minLength": 1},
    },
    "required": ["agent", "rationale"],
    "additionalProperties": True,
}


@dataclass(frozen=True)
class ClassificationAttempt:
    label: AgentKind
    rationale: str

    def __post_init__(self) -> None:
        if not self.rationale:
            raise ValueError("rationale must be nonempty")


@dataclass(frozen=True)
class Route:
    agent: AgentKind


@dataclass(frozen=True)
class Clarify:
    options: frozenset[AgentKind]

    def __post_init__(self) -> None:
        if len(self.options) < 2:
            raise ValueError("clarification needs at least 2 options")


Outcome = Route | Clarify


@dataclass(frozen=True)
class RoutingDecision:
    attempts: tuple[ClassificationAttempt, ...]
    tally: dict[AgentKind, int]
    outcome: Outcome

    def to_payload(self) -> dict:
        payload: dict = {
            "attempts": [
                {"label": a.label.value, "rationale": a.rationale} for a in self.attempts
            ],
            "tally": {k.value: v for k, v in sorted(self.tally.items(), key=lambda kv: kv[0].value)},
        }
        if isinstance(self.outcome, Route):
            payload["outcome"] = {"route": self.outcome.agent.value}
        else:
            payload["outcome"] = {"clarify": sorted(k.value for k in self.outcome.options)}
        return payload


def tally_votes(labels: Sequence[AgentKind]) -> Outcome:
    """Unique plurality wins; tied maxima become a clarification set."""
    if not 2 <= len(labels) <= ATTEMPT_COUNT:
        raise ValueError(f"expected 2-{ATTEMPT_COUNT} labels, got {len(labels)}")
    counts = Counter(labels)
    top = max(counts.values())
    winners = [kind for kind, count in counts.items() if count == top]
    if len(winners) == 1:
        return Route(winners[0])
    return Clarify(frozenset(winners))


def build_clarification(options: frozenset[AgentKind] | set[AgentKind]) -> dict:
    """User-facing clarification payload: one selectable option per agent kind."""
    ordered = sorted(options, key=lambda k: k.value)
    if len(ordered) < 2:
        raise ValueError("clarification needs at least 2 options")
    lines = ["I want to make sure I route this to the right specialist. Did you mean:"]
    rendered = []
    for kind in ordered:
        rendered.append({"agent": kind.value, "description": AGENT_CAPABILITIES[kind]})
        lines.append(f"- {kind.value}: {AGENT_CAPABILITIES[kind]}")
    return {"message": "\n".join(lines), "options": rendered}


def classify(
    query: str,
    history: Sequence[Message],
    gateway: Gateway,
    classifier_prompt: str,
) -> RoutingDecision:
    """Run four independent classification attempts and tally the votes.

    An attempt whose structured output cannot be repaired is re-sampled
    once, then dropped. If fewer than two attempts survive, the outcome is
    a clarification over all three agent kinds rather than a guess.
    """
    if not query:
        raise ValueError("query must be nonempty")
    messages = _classifier_messages(query, history, classifier_prompt)
    request = ChatRequest(
        messages=messages,
        output_schema=CLASSIFIER_SCHEMA,
        temperature=ROUTER_TEMPERATURE,
    )
    attempts: list[ClassificationAttempt] = []
    for index in range(ATTEMPT_COUNT):
        attempt = _sample_attempt(gateway, request)
        if attempt is None:
            attempt = _sample_attempt(gateway, request)  # one re-sample, then drop
        if attempt is not None:
            attempts.append(attempt)
        else:
            logger.warning("classification attempt %d dropped after re-sample", index)
    if len(attempts) < 2:
        outcome: Outcome = Clarify(frozenset(AgentKind))
        tally: Counter[AgentKind] = Counter(a.label for a in attempts)
    else:
        tally = Counter(a.label for a in attempts)
        outcome = tally_votes([a.label for a in attempts])
    decision = RoutingDecision(attempts=tuple(attempts), tally=dict(tally), outcome=outcome)
    logger.info("routing decision: %s", decision.to_payload())
    return decision


def _sample_attempt(gateway: Gateway, request: ChatRequest) -> ClassificationAttempt | None:
    try:
        response = gateway.complete_structured(request)
    except SchemaViolation:
        return None
    document = response.content
    assert isinstance(document, dict)
    return ClassificationAttempt(
        label=AgentKind(document["agent"]),
        rationale=str(document["rationale"]),
    )


def _classifier_messages(
    query: str, history: Sequence[Message], classifier_prompt: str
) -> tuple[Message, ...]:
    window = [m for m in history if m.role in ("user", "assistant")][-HISTORY_WINDOW:]
    context = ""
    if window:
        rendered = "\n".join(f"{m.role}: {m.content}" for m in window)
        context = f"\n\nRecent conversation:\n{rendered}"
    return (
        Message(role="system", content=classifier_prompt),
        Message(role="user", content=f"Classify this query:{context}\n\nQuery: {query}"),
    )
