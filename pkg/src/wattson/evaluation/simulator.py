"""Simulated users: scripted walker (offline) and LLM role-play (live).

Both produce the same turn protocol: say a message, approve/deny a
pending confirmation, or stop (goal met or given up). The scripted walker
replays the deterministic plan for a persona/scenario pair; the live
simulator conditions an LLM on the persona card and the scenario's
success criteria.
"""

from __future__ import annotations

from dataclasses import dataclass

from wattson.evaluation.personas import Persona, Scenario
from wattson.evaluation.scripts import ScriptTurn, build_script
from wattson.gateway import ChatRequest, Gateway, Message

SIMULATOR_TEMPERATURE = 0.7

SIMULATOR_SCHEMA = {
    "type": "object",
    "properties": {
        "action": {
            "type": "string",
            "enum": ["say", "approve", "deny", "stop_goal_met", "stop_give_up"],
        },
        "message": {"type": "string"},
    },
    "required": ["action"],
    "additionalProperties": True,
}


@dataclass(frozen=True)
class StopSignal:
    reason: str  # goal_met | give_up


class ScriptedUser:
    """Walks the deterministic script; stops goal_met after the last turn."""

    def __init__(self, persona: Persona, scenario: Scenario):
        self._turns = build_script(persona, scenario)
        self._position = 0
        self._target = scenario.target_agent.value

    def next_turn(self, clarification_pending: bool = False) -> ScriptTurn | StopSignal:
        if clarification_pending:
            # Scripted votes never tie, but the protocol requires selecting
            # an option when a clarification arrives; answer with the
            # scenario's target agent (a bypass turn, no gateway traffic).
            return ScriptTurn(user_message=self._target, plan=[])
        if self._position >= len(self._turns):
            return StopSignal(reason="goal_met")
        turn = self._turns[self._position]
        self._position += 1
        return turn


def simulate_user_turn(
    persona: Persona,
    scenario: Scenario,
    transcript: list[dict],
    gateway: Gateway,
    confirmation_pending: bool = False,
) -> dict:
    """Live-mode simulated user: one structured decision from the model."""
    persona_card = (
        f"You are role-playing a home energy assistant user: {persona.name} "
        f"(technical level: {persona.technical_level}).\n"
        f"Background: {persona.background}\n"
        f"Characteristics: {'; '.join(persona.characteristics)}\n"
        f"Constraints: {'; '.join(persona.constraints)}\n\n"
        f"Your goal this conversation: {scenario.primary_goal}\n"
        "Success criteria you are privately checking off:\n"
        + "\n".join(f"- {criterion}" for criterion in scenario.success_criteria)
        + "\n\nDecide your next move as this user. Use action 'say' with a message in the "
        "user's voice, 'approve' or 'deny' when the assistant is waiting on a device "
        "confirmation, 'stop_goal_met' once every success criterion is satisfied, or "
        "'stop_give_up' if the conversation is stuck. Stay in character."
    )
    rendered = "\n".join(
        f"{row['role']}: {row['content']}" for row in transcript[-16:]
    ) or "(conversation has not started; open it per the scenario)"
    if confirmation_pending:
        rendered += "\n\n[the assistant is waiting on a device-change confirmation]"
    request = ChatRequest(
        messages=(
            Message(role="system", content=persona_card),
            Message(role="user", content=f"Conversation so far:\n{rendered}\n\nYour move:"),
        ),
        output_schema=SIMULATOR_SCHEMA,
        temperature=SIMULATOR_TEMPERATURE,
    )
    response = gateway.complete_structured(request)
    assert isinstance(response.content, dict)
    return response.content
