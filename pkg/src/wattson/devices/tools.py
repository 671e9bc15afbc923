"""The control agent's tool registry: 10 device-management tools.

Two shared utilities (get_utility_rate, get_current_weather) delegate to
the analytics engine and the weather client so the control agent can make
TOU-aware scheduling and HVAC decisions.
"""

from __future__ import annotations

import json
from datetime import datetime

from wattson.analytics.engine import AnalyticsEngine
from wattson.devices.home import ConfirmationRequired, Executed, Rejected, SmartHome
from wattson.knowledge.weather import WeatherClient
from wattson.tools import ParamSpec, ToolRegistry, ToolResult, ToolSpec

_DEVICE_ID = ParamSpec(name="device_id", type="string", description="Target device id")
_ARGUMENTS = ParamSpec(
    name="arguments",
    type="string",
    description='Action arguments as a JSON object string, e.g. {"setpoint_f": 72}',
    required=False,
)


def build_control_registry(
    home: SmartHome,
    engine: AnalyticsEngine,
    weather: WeatherClient,
) -> ToolRegistry:
    registry = ToolRegistry()

    registry.register(
        ToolSpec(
            name="get_device_list",
            description="List all available smart devices with status summary",
        ),
        lambda: {"devices": home.get_device_list()},
    )
    registry.register(
        ToolSpec(
            name="get_device_status",
            description="Get detailed status of specific device (temperature, mode, power state)",
            parameters=(_DEVICE_ID,),
        ),
        lambda device_id: home.get_device_status(device_id),
    )
    registry.register(
        ToolSpec(
            name="get_all_devices_energy",
            description="Get energy consumption across all devices",
        ),
        lambda: home.get_all_devices_energy(),
    )
    registry.register(
        ToolSpec(
            name="control_device",
            description="Execute control commands (adjust setpoints, change modes, power on/off)",
            parameters=(
                _DEVICE_ID,
                ParamSpec(name="action", type="string", description="Action name from get_available_actions"),
                _ARGUMENTS,
            ),
        ),
        lambda device_id, action, arguments=None: _outcome_to_result(
            home.control_device(device_id, action, _parse_arguments(arguments))
        ),
    )
    registry.register(
        ToolSpec(
            name="get_available_actions",
            description="List available control actions for specific device",
            parameters=(_DEVICE_ID,),
        ),
        lambda device_id: home.get_available_actions(device_id),
    )
    registry.register(
        ToolSpec(
            name="get_device_energy",
            description="Get power consumption for specific device",
            parameters=(_DEVICE_ID,),
        ),
        lambda device_id: home.get_device_energy(device_id),
    )
    registry.register(
        ToolSpec(
            name="schedule_device_action",
            description="Schedule device action for specific time (e.g., charge at midnight)",
            parameters=(
                _DEVICE_ID,
                ParamSpec(name="action", type="string", description="Action name from get_available_actions"),
                ParamSpec(name="fire_at", type="date", description="ISO timestamp to execute at"),
                _ARGUMENTS,
            ),
        ),
        lambda device_id, action, fire_at, arguments=None: _outcome_to_result(
            home.schedule_device_action(
                device_id, action, _parse_arguments(arguments), datetime.fromisoformat(fire_at)
            )
        ),
    )
    registry.register(
        ToolSpec(
            name="get_automation_rules",
            description="List configured automation rules and triggers",
        ),
        lambda: {"rules": home.get_automation_rules()},
    )
    registry.register(
        ToolSpec(
            name="get_utility_rate",
            description="Retrieve utility rate structure for TOU-aware scheduling",
            parameters=(
                ParamSpec(
                    name="name",
                    type="string",
                    description="Rate file stem; omit for the first rate file in the data directory",
                    required=False,
                ),
            ),
        ),
        lambda name=None: engine.get_utility_rate(name),
    )
    registry.register(
        ToolSpec(
            name="get_current_weather",
            description="Retrieve current weather for HVAC optimization decisions",
            parameters=(
                ParamSpec(
                    name="location",
                    type="string",
                    description="Location name or lat,lon pair; omit for the configured default",
                    required=False,
                ),
            ),
        ),
        lambda location=None: weather.current(location),
    )
    return registry


def _parse_arguments(raw: str | None) -> dict:
    if not raw:
        return {}
    parsed = json.loads(raw)
    if not isinstance(parsed, dict):
        raise ValueError("arguments must be a JSON object")
    return parsed


def _outcome_to_result(outcome) -> ToolResult:
    if isinstance(outcome, Executed):
        return ToolResult({"status": "executed", **outcome.result})
    if isinstance(outcome, ConfirmationRequired):
        pending = outcome.confirmation
        return ToolResult(
            {
                "status": "confirmation_required",
                "confirmation_id": pending.confirmation_id,
                "summary": pending.summary,
                "expires_at": pending.expires_at.isoformat(),
            }
        )
    assert isinstance(outcome, Rejected)
    return ToolResult(f"rejected ({outcome.code}): {outcome.reason}", is_error=True)
