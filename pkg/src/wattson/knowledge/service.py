"""Knowledge-base facade: index lifecycle, search, and grounded retrieval."""

from __future__ import annotations

from pathlib import Path

from wattson.analytics.engine import AnalyticsEngine
from wattson.knowledge.index import IndexNotBuilt, KnowledgeIndex, build_index

DEFAULT_TOP_K = 4

GROUNDING_INSTRUCTION = (
    "Ground every claim in one of the returned sources and cite it by source_id. "
    "Anything not supported by a returned source must be labeled general knowledge."
)


class KnowledgeService:
    """Owns the (immutable once built) retrieval index for a corpus directory."""

    def __init__(self, corpus_dir: str | Path):
        self.corpus_dir = Path(corpus_dir)
        self.index: KnowledgeIndex | None = None

    def build(self) -> KnowledgeIndex:
        self.index = build_index(self.corpus_dir)
        return self.index

    def status(self) -> dict:
        if self.index is None:
            return {"built": False, "documents": 0, "chunks": 0, "sources": []}
        manifest = self.index.manifest()
        return {
            "built": True,
            "documents": manifest["documents"],
            "chunks": manifest["chunks"],
            "sources": manifest["sources"],
        }

    def search(self, query: str, k: int = DEFAULT_TOP_K) -> dict:
        index = self._require_index()
        hits = index.search(query, k)
        return {
            "query": query,
            "results": [
                {
                    "source_id": chunk.source_id,
                    "document": chunk.document,
                    "score": score,
                    "text": chunk.text,
                }
                for chunk, score in hits
            ],
            "citations": [chunk.source_id for chunk, _ in hits],
        }

    def knowledge(self, topic: str) -> dict:
        """Retrieval bundle for the agent to synthesize a grounded explanation."""
        retrieval = self.search(topic, DEFAULT_TOP_K)
        grounded = bool(retrieval["results"])
        return {
            "topic": topic,
            "results": retrieval["results"],
            "citations": retrieval["citations"],
            "general_knowledge_only": not grounded,
            "instruction": GROUNDING_INSTRUCTION
            if grounded
            else (
                "No corpus sources matched this topic. Answer from general knowledge "
                "and say so explicitly; do not invent citations."
            ),
        }

    def _require_index(self) -> KnowledgeIndex:
        if self.index is None:
            raise IndexNotBuilt()
        return self.index


def user_context(engine: AnalyticsEngine) -> dict:
    """Session-derived personalization facts; absent data is reported absent."""
    if engine.dataset is None:
        return {
            "data_loaded": False,
            "appliances": [],
            "date_range": None,
            "rate_type": engine.last_rate_type,
            "top_consumer": None,
        }
    meta = engine.dataset.metadata()
    return {
        "data_loaded": True,
        "appliances": meta["tracked_appliances"],
        "date_range": meta["date_range"],
        "rate_type": engine.last_rate_type,
        "top_consumer": engine.top_consumer,
    }
