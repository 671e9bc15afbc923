"""Tool specifications, argument validation, and safe dispatch.

Every agent tool is declared as a ToolSpec with a typed parameter schema.
Arguments are validated against that schema before the handler is invoked;
validation failures and handler exceptions both come back as error
observations (ToolResult with is_error=True), never as crashes, so the
reasoning loop can recover.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime
from typing import Any, Callable, Iterable

PARAM_TYPES = ("number", "integer", "string", "boolean", "enum", "date", "time-range")


@dataclass(frozen=True)
class ParamSpec:
    name: str
    type: str
    description: str
    required: bool = True
    minimum: float | None = None
    maximum: float | None = None
    choices: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.type not in PARAM_TYPES:
            raise ValueError(f"parameter {self.name}: unknown type {self.type!r}")
        if not self.description:
            raise ValueError(f"parameter {self.name}: description is required")
        if self.type == "enum" and not self.choices:
            raise ValueError(f"parameter {self.name}: enum needs choices")


@dataclass(frozen=True)
class ToolSpec:
    name: str
    description: str
    parameters: tuple[ParamSpec, ...] = ()

    def json_schema(self) -> dict[str, Any]:
        """JSON-Schema rendering of the parameter list (for wire formats)."""
        properties: dict[str, Any] = {}
        required: list[str] = []
        for param in self.parameters:
            prop: dict[str, Any] = {"description": param.description}
            if param.type == "number":
                prop["type"] = "number"
            elif param.type == "integer":
                prop["type"] = "integer"
            elif param.type == "boolean":
                prop["type"] = "boolean"
            elif param.type == "enum":
                prop["type"] = "string"
                prop["enum"] = list(param.choices)
            elif param.type == "date":
                prop["type"] = "string"
                prop["format"] = "date-time"
            elif param.type == "time-range":
                prop["type"] = "object"
                prop["properties"] = {
                    "start": {"type": "string", "format": "date-time"},
                    "end": {"type": "string", "format": "date-time"},
                }
                prop["required"] = ["start", "end"]
            else:
                prop["type"] = "string"
            if param.minimum is not None:
                prop["minimum"] = param.minimum
            if param.maximum is not None:
                prop["maximum"] = param.maximum
            properties[param.name] = prop
            if param.required:
                required.append(param.name)
        return {"type": "object", "properties": properties, "required": required}


@dataclass(frozen=True)
class ToolCall:
    tool: str
    arguments: dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class ToolResult:
    content: Any
    is_error: bool = False

    def as_text(self) -> str:
        if isinstance(self.content, str):
            return self.content
        return json.dumps(self.content, default=str)


Handler = Callable[..., Any]


class ToolRegistry:
    """Ordered mapping of tool name to (spec, handler); names are unique."""

    def __init__(self) -> None:
        self._specs: dict[str, ToolSpec] = {}
        self._handlers: dict[str, Handler] = {}

    def register(self, spec: ToolSpec, handler: Handler) -> None:
        if spec.name in self._specs:
            raise ValueError(f"duplicate tool name {spec.name!r}")
        self._specs[spec.name] = spec
        self._handlers[spec.name] = handler

    def names(self) -> list[str]:
        return list(self._specs)

    def specs(self) -> tuple[ToolSpec, ...]:
        return tuple(self._specs.values())

    def spec(self, name: str) -> ToolSpec | None:
        return self._specs.get(name)

    def handler(self, name: str) -> Handler | None:
        return self._handlers.get(name)

    def __len__(self) -> int:
        return len(self._specs)

    def __contains__(self, name: str) -> bool:
        return name in self._specs


def validate_arguments(spec: ToolSpec, arguments: dict[str, Any]) -> dict[str, Any] | str:
    """Check arguments against the spec; return coerced args or an error string."""
    known = {p.name: p for p in spec.parameters}
    for name in arguments:
        if name not in known:
            return f"unexpected parameter {name!r} for tool {spec.name}"
    coerced: dict[str, Any] = {}
    for param in spec.parameters:
        if param.name not in arguments or arguments[param.name] is None:
            if param.required:
                return f"missing required parameter {param.name!r}"
            continue
        value = arguments[param.name]
        error = _check_value(param, value)
        if error is not None:
            return error
        coerced[param.name] = _coerce_value(param, value)
    return coerced


def _check_value(param: ParamSpec, value: Any) -> str | None:
    kind = param.type
    if kind == "number":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            return f"{param.name} must be a number"
        return _check_bounds(param, float(value))
    if kind == "integer":
        if isinstance(value, bool):
            return f"{param.name} must be an integer"
        if isinstance(value, float) and not value.is_integer():
            return f"{param.name} must be an integer"
        if not isinstance(value, (int, float)):
            return f"{param.name} must be an integer"
        return _check_bounds(param, float(value))
    if kind == "string":
        if not isinstance(value, str):
            return f"{param.name} must be a string"
        return None
    if kind == "boolean":
        if not isinstance(value, bool):
            return f"{param.name} must be a boolean"
        return None
    if kind == "enum":
        if value not in param.choices:
            return f"{param.name} must be one of {list(param.choices)}, got {value!r}"
        return None
    if kind == "date":
        if not isinstance(value, str):
            return f"{param.name} must be an ISO date string"
        try:
            datetime.fromisoformat(value)
        except ValueError:
            return f"{param.name} is not a valid ISO date: {value!r}"
        return None
    if kind == "time-range":
        if not isinstance(value, dict) or "start" not in value or "end" not in value:
            return f"{param.name} must be an object with 'start' and 'end'"
        try:
            start = datetime.fromisoformat(str(value["start"]))
            end = datetime.fromisoformat(str(value["end"]))
        except ValueError:
            return f"{param.name} bounds are not valid ISO timestamps"
        if start >= end:
            return f"{param.name} start must be before end"
        return None
    return f"{param.name} has unsupported type {kind!r}"


def _check_bounds(param: ParamSpec, value: float) -> str | None:
    if param.minimum is not None and value < param.minimum:
        return f"{param.name} must be >= {_fmt(param.minimum)}, got {_fmt(value)}"
    if param.maximum is not None and value > param.maximum:
        return f"{param.name} must be <= {_fmt(param.maximum)}, got {_fmt(value)}"
    return None


def _fmt(value: float) -> str:
    return str(int(value)) if float(value).is_integer() else str(value)


def _coerce_value(param: ParamSpec, value: Any) -> Any:
    if param.type == "integer":
        return int(value)
    if param.type == "number":
        return float(value)
    return value


def execute_tool(registry: ToolRegistry, call: ToolCall) -> ToolResult:
    """Dispatch a validated tool call; all failures become error observations."""
    spec = registry.spec(call.tool)
    if spec is None:
        available = ", ".join(registry.names())
        return ToolResult(f"unknown tool {call.tool!r}; available tools: {available}", is_error=True)
    outcome = validate_arguments(spec, call.arguments or {})
    if isinstance(outcome, str):
        return ToolResult(outcome, is_error=True)
    handler = registry.handler(call.tool)
    assert handler is not None
    try:
        value = handler(**outcome)
    except Exception as exc:  # noqa: BLE001 — observations, not crashes
        return ToolResult(f"{type(exc).__name__}: {exc}", is_error=True)
    if isinstance(value, ToolResult):
        return value
    return ToolResult(value)


def registry_from(specs_and_handlers: Iterable[tuple[ToolSpec, Handler]]) -> ToolRegistry:
    registry = ToolRegistry()
    for spec, handler in specs_and_handlers:
        registry.register(spec, handler)
    return registry
