"""Persona and scenario definitions for the evaluation harness."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from wattson.routing import AgentKind

TECHNICAL_LEVELS = ("novice", "intermediate", "expert")


class EvalParseError(Exception):
    pass


@dataclass(frozen=True)
class Persona:
    name: str
    technical_level: str
    background: str
    characteristics: tuple[str, ...]
    constraints: tuple[str, ...]

    def __post_init__(self) -> None:
        if self.technical_level not in TECHNICAL_LEVELS:
            raise EvalParseError(
                f"persona {self.name!r}: technical_level must be one of {TECHNICAL_LEVELS}"
            )
        if not self.characteristics:
            raise EvalParseError(f"persona {self.name!r}: characteristics must be nonempty")


@dataclass(frozen=True)
class Scenario:
    name: str
    target_agent: AgentKind
    primary_goal: str
    success_criteria: tuple[str, ...]
    max_turns: int
    opening_hint: str

    def __post_init__(self) -> None:
        if self.max_turns <= 0:
            raise EvalParseError(f"scenario {self.name!r}: max_turns must be > 0")
        if not self.success_criteria:
            raise EvalParseError(f"scenario {self.name!r}: success_criteria must be nonempty")

    @property
    def is_control(self) -> bool:
        return self.target_agent is AgentKind.CONTROL


def load_personas(path: str | Path) -> list[Persona]:
    rows = _load_list(path)
    personas = []
    for raw in rows:
        try:
            personas.append(
                Persona(
                    name=str(raw["name"]),
                    technical_level=str(raw["technical_level"]),
                    background=str(raw["background"]),
                    characteristics=tuple(raw["characteristics"]),
                    constraints=tuple(raw.get("constraints", ())),
                )
            )
        except KeyError as exc:
            raise EvalParseError(f"persona entry missing field {exc}") from None
    return personas


def load_scenarios(path: str | Path) -> list[Scenario]:
    rows = _load_list(path)
    scenarios = []
    for raw in rows:
        try:
            scenarios.append(
                Scenario(
                    name=str(raw["name"]),
                    target_agent=AgentKind(raw["target_agent"]),
                    primary_goal=str(raw["primary_goal"]),
                    success_criteria=tuple(raw["success_criteria"]),
                    max_turns=int(raw["max_turns"]),
                    opening_hint=str(raw.get("opening_hint", "")),
                )
            )
        except KeyError as exc:
            raise EvalParseError(f"scenario entry missing field {exc}") from None
        except ValueError as exc:
            raise EvalParseError(str(exc)) from None
    return scenarios


def _load_list(path: str | Path) -> list[dict]:
    file_path = Path(path)
    if not file_path.is_file():
        raise EvalParseError(f"file not found: {file_path}")
    try:
        document = json.loads(file_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise EvalParseError(f"{file_path.name}: invalid JSON ({exc})") from None
    if not isinstance(document, list):
        raise EvalParseError(f"{file_path.name}: expected a JSON array")
    return document
