"""Deterministic energy analytics over appliance-level interval data."""

from wattson.analytics.dataset import EnergyDataset, TimeRange, load_energy_csv
from wattson.analytics.engine import AnalyticsEngine
from wattson.analytics.rates import RateSchedule, load_rate_schedule
from wattson.analytics.tools import build_analysis_registry

__all__ = [
    "AnalyticsEngine",
    "EnergyDataset",
    "RateSchedule",
    "TimeRange",
    "build_analysis_registry",
    "load_energy_csv",
    "load_rate_schedule",
]
