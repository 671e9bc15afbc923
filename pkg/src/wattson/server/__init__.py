"""Backend service: sessions, message processing, streaming, HTTP app."""

from wattson.server.config import AppConfig, load_config
from wattson.server.service import Busy, ChatService, StreamEvent, UnknownSession
from wattson.server.app import create_app

__all__ = [
    "AppConfig",
    "Busy",
    "ChatService",
    "StreamEvent",
    "UnknownSession",
    "create_app",
    "load_config",
]
