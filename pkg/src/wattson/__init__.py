"""Conversational multi-agent assistant for home energy management.

Three specialized agents (analysis, knowledge, control) behind a
self-consistency query router, a streaming HTTP API, and an offline
evaluation harness with 23 objective metrics.
"""

__version__ = "0.1.0"
