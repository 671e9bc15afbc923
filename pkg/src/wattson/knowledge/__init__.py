"""Document retrieval, weather integration, and user-context tools."""

from wattson.knowledge.index import KnowledgeIndex, build_index, chunk_text
from wattson.knowledge.service import KnowledgeService
from wattson.knowledge.tools import build_knowledge_registry
from wattson.knowledge.weather import WeatherClient

__all__ = [
    "KnowledgeIndex",
    "KnowledgeService",
    "WeatherClient",
    "build_index",
    "build_knowledge_registry",
    "chunk_text",
]
