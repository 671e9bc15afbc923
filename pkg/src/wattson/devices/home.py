"""Simulated smart home mirroring commercial appliance-API structure.

Devices load from a JSON config of descriptors (metadata, capabilities,
state, range-bounded settings, action-parameter pairs). Commands are
validated against those ranges before anything mutates; actions deemed
significant require an explicit approved confirmation first. Time is a
manually-advanced simulated clock, injected so tests and the evaluation
harness stay deterministic.

Significance policy (overridable per action via the config's
``significant`` flag): temperature-setpoint changes of at least 2 degrees,
any thermostat or water-heater mode change, and any thermostat or
water-heater power-off.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from datetime import datetime, timedelta
from pathlib import Path
from typing import Any

from wattson.tools import ParamSpec, ToolSpec, validate_arguments

SIGNIFICANT_SETPOINT_DELTA = 2.0
CONFIRMATION_TTL = timedelta(minutes=10)
SEASONAL_HEAT_BLOCK_MONTHS = (6, 7, 8, 9)  # heat mode rejected Jun-Sep
GUARDED_TYPES = ("thermostat", "water_heater")


class DeviceError(Exception):
    pass


class ConfigInvalid(DeviceError):
    pass


class UnknownDevice(DeviceError):
    pass


class UnknownAction(DeviceError):
    pass


class UnknownConfirmation(DeviceError):
    pass


class ConfirmationExpired(DeviceError):
    pass


class PastTime(DeviceError):
    pass


class SimClock:
    """Manually-advanced simulated time; never reads the wall clock."""

    def __init__(self, start: datetime):
        self._now = start
        self._lock = threading.Lock()

    def now(self) -> datetime:
        with self._lock:
            return self._now

    def advance(self, delta: timedelta | None = None, to: datetime | None = None) -> datetime:
        with self._lock:
            target = to if to is not None else self._now + (delta or timedelta(0))
            if target < self._now:
                raise ValueError("simulated clock cannot move backwards")
            self._now = target
            return self._now


@dataclass
class Setting:
    value: float
    minimum: float
    maximum: float
    unit: str

    def __post_init__(self) -> None:
        if not self.minimum <= self.value <= self.maximum:
            raise ConfigInvalid(
                f"setting value {self.value} outside range [{self.minimum}, {self.maximum}]"
            )


@dataclass(frozen=True)
class DeviceAction:
    name: str
    description: str
    parameters: tuple[ParamSpec, ...] = ()
    significant: bool | None = None  # None = defer to policy


@dataclass
class Device:
    device_id: str
    type: str
    name: str
    capabilities: list[str]
    state: dict[str, Any]
    settings: dict[str, Setting]
    actions: dict[str, DeviceAction]
    draw_watts: float
    # energy accounting in simulated time
    session_kwh: float = 0.0
    on_since: datetime | None = None

    @property
    def power(self) -> str:
        return self.state.get("power", "off")

    def settle_energy(self, now: datetime) -> None:
        if self.on_since is not None:
            hours = (now - self.on_since).total_seconds() / 3600.0
            self.session_kwh += self.draw_watts / 1000.0 * hours
            self.on_since = now

    def current_draw(self) -> float:
        return self.draw_watts if self.power == "on" else 0.0

    def snapshot(self) -> dict:
        return {
            "device_id": self.device_id,
            "state": dict(self.state),
            "settings": {k: s.value for k, s in self.settings.items()},
        }


@dataclass(frozen=True)
class PendingConfirmation:
    confirmation_id: str
    device_id: str
    action: str
    arguments: dict[str, Any]
    summary: str
    created_at: datetime
    expires_at: datetime
    fire_at: datetime | None = None  # set when confirming a scheduled action


@dataclass
class ScheduledAction:
    schedule_id: str
    device_id: str
    action: str
    arguments: dict[str, Any]
    fire_at: datetime
    status: str = "pending"  # pending | fired | cancelled


@dataclass(frozen=True)
class AutomationRule:
    rule_id: str
    trigger: str
    device_id: str
    action: str
    enabled: bool = True


@dataclass(frozen=True)
class Executed:
    result: dict


@dataclass(frozen=True)
class ConfirmationRequired:
    confirmation: PendingConfirmation


@dataclass(frozen=True)
class Rejected:
    reason: str
    code: str


ControlOutcome = Executed | ConfirmationRequired | Rejected


class SmartHome:
    """Single-writer device fleet: every mutation runs under one lock."""

    def __init__(
        self,
        devices: list[Device],
        rules: list[AutomationRule],
        clock: SimClock,
        allow_offseason_modes: bool = False,
    ):
        self._devices = {d.device_id: d for d in devices}
        self._rules = list(rules)
        self.clock = clock
        self.allow_offseason_modes = allow_offseason_modes
        self._lock = threading.RLock()
        self._confirmations: dict[str, PendingConfirmation] = {}
        self._schedules: list[ScheduledAction] = []
        self._counter = 0
        for device in self._devices.values():
            if device.power == "on":
                device.on_since = clock.now()

    # ── discovery and status ────────────────────────────────────────────

    def get_device_list(self) -> list[dict]:
        with self._lock:
            return [
                {
                    "device_id": d.device_id,
                    "type": d.type,
                    "name": d.name,
                    "power": d.power,
                    "status": _one_line_status(d),
                }
                for d in self._devices.values()
            ]

    def get_device_status(self, device_id: str) -> dict:
        with self._lock:
            device = self._require(device_id)
            return {
                "device_id": device.device_id,
                "type": device.type,
                "name": device.name,
                "capabilities": list(device.capabilities),
                "state": dict(device.state),
                "settings": {
                    key: {
                        "value": s.value,
                        "min": s.minimum,
                        "max": s.maximum,
                        "unit": s.unit,
                    }
                    for key, s in device.settings.items()
                },
            }

    def get_device_energy(self, device_id: str) -> dict:
        with self._lock:
            device = self._require(device_id)
            device.settle_energy(self.clock.now())
            return {
                "device_id": device.device_id,
                "current_draw_watts": device.current_draw(),
                "session_kwh": device.session_kwh,
            }

    def get_all_devices_energy(self) -> dict:
        with self._lock:
            readings = [self.get_device_energy(device_id) for device_id in self._devices]
            return {
                "devices": readings,
                "total_draw_watts": sum(r["current_draw_watts"] for r in readings),
                "total_session_kwh": sum(r["session_kwh"] for r in readings),
            }

    def get_available_actions(self, device_id: str) -> dict:
        with self._lock:
            device = self._require(device_id)
            actions = []
            for action in device.actions.values():
                actions.append(
                    {
                        "name": action.name,
                        "description": action.description,
                        "parameters": [
                            {
                                "name": p.name,
                                "type": p.type,
                                "description": p.description,
                                "required": p.required,
                                **({"min": p.minimum} if p.minimum is not None else {}),
                                **({"max": p.maximum} if p.maximum is not None else {}),
                                **({"choices": list(p.choices)} if p.choices else {}),
                            }
                            for p in action.parameters
                        ],
                        "requires_confirmation": self._significance_note(device, action),
                    }
                )
            return {"device_id": device_id, "actions": actions}

    def get_automation_rules(self) -> list[dict]:
        with self._lock:
            return [
                {
                    "rule_id": r.rule_id,
                    "trigger": r.trigger,
                    "device_id": r.device_id,
                    "action": r.action,
                    "enabled": r.enabled,
                }
                for r in self._rules
            ]

    # ── command execution ───────────────────────────────────────────────

    def control_device(self, device_id: str, action: str, arguments: dict | None = None) -> ControlOutcome:
        arguments = dict(arguments or {})
        with self._lock:
            device = self._require(device_id)
            spec = device.actions.get(action)
            if spec is None:
                raise UnknownAction(
                    f"device {device_id!r} has no action {action!r}; "
                    f"available: {sorted(device.actions)}"
                )
            rejection = self._validate(device, spec, arguments)
            if rejection is not None:
                return rejection
            if self._is_significant(device, spec, arguments):
                confirmation = self._new_confirmation(device, spec, arguments, fire_at=None)
                return ConfirmationRequired(confirmation)
            return Executed(self._apply(device, spec, arguments))

    def confirm_action(self, confirmation_id: str, approved: bool) -> dict:
        with self._lock:
            pending = self._confirmations.pop(confirmation_id, None)
            if pending is None:
                raise UnknownConfirmation(f"no pending confirmation {confirmation_id!r}")
            if self.clock.now() > pending.expires_at:
                raise ConfirmationExpired(f"confirmation {confirmation_id!r} expired")
            if not approved:
                return {
                    "status": "cancelled",
                    "confirmation_id": confirmation_id,
                    "summary": pending.summary,
                }
            device = self._require(pending.device_id)
            spec = device.actions[pending.action]
            if pending.fire_at is not None:
                schedule = self._new_schedule(device, spec, pending.arguments, pending.fire_at)
                return {
                    "status": "scheduled",
                    "confirmation_id": confirmation_id,
                    "schedule": _schedule_payload(schedule),
                }
            result = self._apply(device, spec, pending.arguments)
            return {"status": "executed", "confirmation_id": confirmation_id, "result": result}

    def schedule_device_action(
        self, device_id: str, action: str, arguments: dict | None, fire_at: datetime
    ) -> ControlOutcome:
        arguments = dict(arguments or {})
        with self._lock:
            if fire_at <= self.clock.now():
                raise PastTime(f"fire_at {fire_at.isoformat()} is not after simulated now")
            device = self._require(device_id)
            spec = device.actions.get(action)
            if spec is None:
                raise UnknownAction(f"device {device_id!r} has no action {action!r}")
            rejection = self._validate(device, spec, arguments)  # eager validation
            if rejection is not None:
                return rejection
            if self._is_significant(device, spec, arguments):
                confirmation = self._new_confirmation(device, spec, arguments, fire_at=fire_at)
                return ConfirmationRequired(confirmation)
            return Executed({"scheduled": _schedule_payload(self._new_schedule(device, spec, arguments, fire_at))})

    def advance_clock(self, delta: timedelta | None = None, to: datetime | None = None) -> dict:
        """Test/eval-only hook: move simulated time and fire due schedules."""
        with self._lock:
            now = self.clock.advance(delta=delta, to=to)
            fired = []
            for schedule in sorted(
                (s for s in self._schedules if s.status == "pending" and s.fire_at <= now),
                key=lambda s: s.fire_at,
            ):
                device = self._require(schedule.device_id)
                spec = device.actions[schedule.action]
                # Validated (and confirmed, when significant) at scheduling time.
                self._apply(device, spec, schedule.arguments, at=schedule.fire_at)
                schedule.status = "fired"
                fired.append(schedule.schedule_id)
            return {"now": now.isoformat(), "fired": fired}

    @property
    def schedules(self) -> list[ScheduledAction]:
        return list(self._schedules)

    @property
    def pending_confirmations(self) -> list[PendingConfirmation]:
        return list(self._confirmations.values())

    def fleet_snapshot(self) -> list[dict]:
        with self._lock:
            return [d.snapshot() for d in self._devices.values()]

    # ── internals ───────────────────────────────────────────────────────

    def _require(self, device_id: str) -> Device:
        device = self._devices.get(device_id)
        if device is None:
            raise UnknownDevice(
                f"unknown device {device_id!r}; known devices: {sorted(self._devices)}"
            )
        return device

    def _validate(self, device: Device, spec: DeviceAction, arguments: dict) -> Rejected | None:
        # Types and enums first (bounds handled below so range violations
        # come back as out_of_range with the limit named).
        unbounded = tuple(
            ParamSpec(
                name=p.name,
                type=p.type,
                description=p.description,
                required=p.required,
                choices=p.choices,
            )
            for p in spec.parameters
        )
        tool_view = ToolSpec(name=spec.name, description=spec.description, parameters=unbounded)
        outcome = validate_arguments(tool_view, arguments)
        if isinstance(outcome, str):
            return Rejected(reason=outcome, code="invalid_arguments")
        arguments.clear()
        arguments.update(outcome)
        bounds = {p.name: (p.minimum, p.maximum) for p in spec.parameters}
        for key, value in arguments.items():
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                continue
            param_min, param_max = bounds.get(key, (None, None))
            setting = device.settings.get(key)
            minimum = max(
                (m for m in (param_min, setting.minimum if setting else None) if m is not None),
                default=None,
            )
            maximum = min(
                (m for m in (param_max, setting.maximum if setting else None) if m is not None),
                default=None,
            )
            if minimum is not None and value < minimum:
                return Rejected(
                    reason=f"{key} {_fmt(value)} is below minimum {_fmt(minimum)}",
                    code="out_of_range",
                )
            if maximum is not None and value > maximum:
                return Rejected(
                    reason=f"{key} {_fmt(value)} is above maximum {_fmt(maximum)}",
                    code="out_of_range",
                )
        mode = arguments.get("mode")
        if (
            mode == "heat"
            and device.type in GUARDED_TYPES
            and self.clock.now().month in SEASONAL_HEAT_BLOCK_MONTHS
            and not self.allow_offseason_modes
        ):
            return Rejected(
                reason=(
                    "heat mode is blocked during summer months (Jun-Sep); "
                    "set allow_offseason_modes in the home config to override"
                ),
                code="mode_invalid",
            )
        return None

    def _is_significant(self, device: Device, spec: DeviceAction, arguments: dict) -> bool:
        if spec.significant is not None:
            return spec.significant
        if device.type in GUARDED_TYPES:
            if spec.name == "power_off":
                return True
            if "mode" in arguments and arguments["mode"] != device.state.get("mode"):
                return True
        for key, value in arguments.items():
            setting = device.settings.get(key)
            if setting is not None and isinstance(value, (int, float)):
                if abs(float(value) - setting.value) >= SIGNIFICANT_SETPOINT_DELTA:
                    return True
        return False

    def _significance_note(self, device: Device, action: DeviceAction) -> str:
        if action.significant is True:
            return "always"
        if action.significant is False:
            return "never"
        notes = []
        if device.type in GUARDED_TYPES:
            if action.name == "power_off":
                return "always"
            notes.append("on mode change")
        numeric = [p.name for p in action.parameters if p.name in device.settings]
        if numeric:
            notes.append(
                f"when {'/'.join(numeric)} changes by >= {_fmt(SIGNIFICANT_SETPOINT_DELTA)}"
            )
        return "; ".join(notes) if notes else "never"

    def _new_confirmation(
        self, device: Device, spec: DeviceAction, arguments: dict, fire_at: datetime | None
    ) -> PendingConfirmation:
        self._counter += 1
        now = self.clock.now()
        rendered_args = ", ".join(f"{k}={v}" for k, v in arguments.items()) or "no arguments"
        summary = f"{spec.name} on {device.name} ({rendered_args})"
        if fire_at is not None:
            summary += f", scheduled for {fire_at.isoformat()}"
        confirmation = PendingConfirmation(
            confirmation_id=f"cfm-{self._counter:04d}",
            device_id=device.device_id,
            action=spec.name,
            arguments=dict(arguments),
            summary=summary,
            created_at=now,
            expires_at=now + CONFIRMATION_TTL,
            fire_at=fire_at,
        )
        self._confirmations[confirmation.confirmation_id] = confirmation
        return confirmation

    def _new_schedule(
        self, device: Device, spec: DeviceAction, arguments: dict, fire_at: datetime
    ) -> ScheduledAction:
        self._counter += 1
        schedule = ScheduledAction(
            schedule_id=f"sch-{self._counter:04d}",
            device_id=device.device_id,
            action=spec.name,
            arguments=dict(arguments),
            fire_at=fire_at,
        )
        self._schedules.append(schedule)
        return schedule

    def _apply(self, device: Device, spec: DeviceAction, arguments: dict, at: datetime | None = None) -> dict:
        now = at or self.clock.now()
        device.settle_energy(now)
        changes: dict[str, Any] = {}
        if spec.name == "power_on":
            device.state["power"] = "on"
            device.on_since = now
            changes["power"] = "on"
        elif spec.name == "power_off":
            device.state["power"] = "off"
            device.on_since = None
            changes["power"] = "off"
        for key, value in arguments.items():
            if key in device.settings:
                device.settings[key].value = float(value)
                changes[key] = float(value)
            elif key == "mode":
                device.state["mode"] = value
                changes["mode"] = value
            else:
                device.state[key] = value
                changes[key] = value
        return {
            "device_id": device.device_id,
            "action": spec.name,
            "changes": changes,
            "state": dict(device.state),
            "settings": {k: s.value for k, s in device.settings.items()},
        }


# ── config loading ───────────────────────────────────────────────────────


def load_home_config(path: str | Path, clock: SimClock | None = None) -> SmartHome:
    config_path = Path(path)
    if not config_path.is_file():
        raise ConfigInvalid(f"home config not found: {config_path}")
    try:
        document = json.loads(config_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigInvalid(f"{config_path.name}: invalid JSON ({exc})") from None
    return home_from_document(document, clock=clock)


def home_from_document(document: dict, clock: SimClock | None = None) -> SmartHome:
    if not isinstance(document, dict) or "devices" not in document:
        raise ConfigInvalid("home config must be an object with a 'devices' array")
    if clock is None:
        start_raw = document.get("simulated_time", "2025-07-15T12:00:00")
        clock = SimClock(datetime.fromisoformat(start_raw))
    devices = [_parse_device(raw) for raw in document["devices"]]
    ids = [d.device_id for d in devices]
    if len(set(ids)) != len(ids):
        raise ConfigInvalid(f"duplicate device ids in config: {ids}")
    rules = []
    for raw in document.get("automation_rules", []):
        rule = AutomationRule(
            rule_id=str(raw.get("rule_id", f"rule-{len(rules) + 1}")),
            trigger=str(raw.get("trigger", "")),
            device_id=str(raw.get("device_id", "")),
            action=str(raw.get("action", "")),
            enabled=bool(raw.get("enabled", True)),
        )
        owner = next((d for d in devices if d.device_id == rule.device_id), None)
        if owner is None:
            raise ConfigInvalid(f"automation rule {rule.rule_id} references unknown device {rule.device_id!r}")
        if rule.action not in owner.actions:
            raise ConfigInvalid(
                f"automation rule {rule.rule_id} references unknown action {rule.action!r} "
                f"on device {rule.device_id!r}"
            )
        rules.append(rule)
    return SmartHome(
        devices=devices,
        rules=rules,
        clock=clock,
        allow_offseason_modes=bool(document.get("allow_offseason_modes", False)),
    )


def _parse_device(raw: dict) -> Device:
    try:
        device_id = str(raw["device_id"])
        settings = {}
        for key, body in (raw.get("settings") or {}).items():
            try:
                settings[key] = Setting(
                    value=float(body["value"]),
                    minimum=float(body["min"]),
                    maximum=float(body["max"]),
                    unit=str(body.get("unit", "")),
                )
            except ConfigInvalid as exc:
                raise ConfigInvalid(f"device {device_id!r} setting {key!r}: {exc}") from None
        actions: dict[str, DeviceAction] = {}
        for action_raw in raw.get("actions") or []:
            parameters = tuple(
                ParamSpec(
                    name=str(p["name"]),
                    type=str(p.get("type", "number")),
                    description=str(p.get("description", p["name"])),
                    required=bool(p.get("required", True)),
                    minimum=p.get("min"),
                    maximum=p.get("max"),
                    choices=tuple(p.get("choices", ())),
                )
                for p in action_raw.get("parameters", [])
            )
            action = DeviceAction(
                name=str(action_raw["name"]),
                description=str(action_raw.get("description", action_raw["name"])),
                parameters=parameters,
                significant=action_raw.get("significant"),
            )
            for param in parameters:
                setting = settings.get(param.name)
                if setting is not None:
                    if param.minimum is not None and param.minimum < setting.minimum:
                        raise ConfigInvalid(
                            f"device {device_id!r} action {action.name!r}: parameter "
                            f"{param.name!r} min {param.minimum} below setting min {setting.minimum}"
                        )
                    if param.maximum is not None and param.maximum > setting.maximum:
                        raise ConfigInvalid(
                            f"device {device_id!r} action {action.name!r}: parameter "
                            f"{param.name!r} max {param.maximum} above setting max {setting.maximum}"
                        )
            actions[action.name] = action
        return Device(
            device_id=device_id,
            type=str(raw.get("type", "device")),
            name=str(raw.get("name", device_id)),
            capabilities=[str(c) for c in raw.get("capabilities", [])],
            state=dict(raw.get("state") or {}),
            settings=settings,
            actions=actions,
            draw_watts=float(raw.get("draw_watts", 0.0)),
        )
    except KeyError as exc:
        raise ConfigInvalid(f"device descriptor missing field {exc}") from None


def _one_line_status(device: Device) -> str:
    bits = [f"power {device.power}"]
    if "mode" in device.state:
        bits.append(f"mode {device.state['mode']}")
    for key, setting in device.settings.items():
        bits.append(f"{key} {_fmt(setting.value)}{setting.unit}")
    return ", ".join(bits)


def _schedule_payload(schedule: ScheduledAction) -> dict:
    return {
        "schedule_id": schedule.schedule_id,
        "device_id": schedule.device_id,
        "action": schedule.action,
        "arguments": dict(schedule.arguments),
        "fire_at": schedule.fire_at.isoformat(),
        "status": schedule.status,
    }


def _fmt(value: float) -> str:
    return str(int(value)) if float(value).is_integer() else str(value)
