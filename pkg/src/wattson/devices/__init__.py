"""Simulated smart home and the control agent's tools."""

from wattson.devices.home import SimClock, SmartHome, load_home_config
from wattson.devices.tools import build_control_registry

__all__ = ["SimClock", "SmartHome", "build_control_registry", "load_home_config"]
