"""Simulated-user evaluation: drive conversations, annotate, score 23 metrics."""

from wattson.evaluation.metrics import METRIC_NAMES, METRIC_TIERS, compute_metrics
from wattson.evaluation.personas import Persona, Scenario, load_personas, load_scenarios
from wattson.evaluation.runner import run_evaluation

__all__ = [
    "METRIC_NAMES",
    "METRIC_TIERS",
    "Persona",
    "Scenario",
    "compute_metrics",
    "load_personas",
    "load_scenarios",
    "run_evaluation",
]
