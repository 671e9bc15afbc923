"""Lexical retrieval over the bundled energy document corpus.

Documents are chunked to ~1500 characters with 200-character overlap,
preferring paragraph boundaries, then ranked with BM25 (k1=1.2, b=0.75).
The index is a pure function of the corpus directory content, so
rebuilding an unchanged corpus yields an identical digest.
"""

from __future__ import annotations

import hashlib
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

CHUNK_TARGET = 1500
CHUNK_OVERLAP = 200
BM25_K1 = 1.2
BM25_B = 0.75

_TOKEN = re.compile(r"[a-z0-9]+")


class EmptyCorpus(Exception):
    pass


class IndexNotBuilt(Exception):
    def __init__(self) -> None:
        super().__init__("knowledge index not built; run the index build step first")


@dataclass(frozen=True)
class DocumentChunk:
    source_id: str  # "<document name>#<chunk ordinal>"
    document: str
    text: str
    start: int  # character offsets into the document text
    end: int


@dataclass
class KnowledgeIndex:
    corpus_dir: Path
    chunks: list[DocumentChunk]
    documents: list[str]
    _doc_freq: Counter = field(default_factory=Counter)
    _chunk_terms: list[Counter] = field(default_factory=list)
    _chunk_lengths: list[int] = field(default_factory=list)
    _avg_length: float = 0.0

    def __post_init__(self) -> None:
        for chunk in self.chunks:
            terms = Counter(tokenize(chunk.text))
            self._chunk_terms.append(terms)
            self._chunk_lengths.append(sum(terms.values()))
            self._doc_freq.update(terms.keys())
        total = sum(self._chunk_lengths)
        self._avg_length = total / len(self.chunks) if self.chunks else 0.0

    def search(self, query: str, k: int) -> list[tuple[DocumentChunk, float]]:
        """Top-k chunks by BM25 score; zero-overlap queries return nothing.

        Ties break by source_id so identical corpora rank identically.
        """
        if k < 1:
            raise ValueError("k must be >= 1")
        query_terms = tokenize(query)
        if not query_terms:
            return []
        n = len(self.chunks)
        scored: list[tuple[float, str, DocumentChunk]] = []
        for i, chunk in enumerate(self.chunks):
            terms = self._chunk_terms[i]
            length = self._chunk_lengths[i]
            score = 0.0
            for term in set(query_terms):
                tf = terms.get(term, 0)
                if tf == 0:
                    continue
                df = self._doc_freq[term]
                idf = math.log(1.0 + (n - df + 0.5) / (df + 0.5))
                denominator = tf + BM25_K1 * (1.0 - BM25_B + BM25_B * length / self._avg_length)
                score += idf * tf * (BM25_K1 + 1.0) / denominator
            if score > 0.0:
                scored.append((score, chunk.source_id, chunk))
        scored.sort(key=lambda item: (-item[0], item[1]))
        return [(chunk, score) for score, _, chunk in scored[:k]]

    def digest(self) -> str:
        hasher = hashlib.sha256()
        for chunk in self.chunks:
            hasher.update(chunk.source_id.encode("utf-8"))
            hasher.update(b"\x00")
            hasher.update(chunk.text.encode("utf-8"))
            hasher.update(b"\x01")
        return hasher.hexdigest()

    def manifest(self) -> dict:
        return {
            "documents": len(self.documents),
            "chunks": len(self.chunks),
            "sources": list(self.documents),
            "digest": self.digest(),
        }


def tokenize(text: str) -> list[str]:
    return _TOKEN.findall(text.lower())


def chunk_text(text: str, target: int = CHUNK_TARGET, overlap: int = CHUNK_OVERLAP) -> list[tuple[int, int]]:
    """Character spans of each chunk, preferring paragraph boundaries.

    A chunk ends at the last blank-line boundary within the target window;
    when a single paragraph exceeds the target it is split mid-paragraph.
    Consecutive chunks overlap by ``overlap`` characters.
    """
    body = text.rstrip()
    if not body:
        return []
    if len(body) <= target:
        return [(0, len(body))]
    spans: list[tuple[int, int]] = []
    start = 0
    while start < len(body):
        end = min(start + target, len(body))
        if end < len(body):
            boundary = body.rfind("\n\n", start + 1, end + 1)
            if boundary > start:
                end = boundary
        spans.append((start, end))
        if end >= len(body):
            break
        start = max(end - overlap, start + 1)
    return spans


def chunk_document(name: str, text: str) -> list[DocumentChunk]:
    chunks = []
    for ordinal, (start, end) in enumerate(chunk_text(text)):
        chunks.append(
            DocumentChunk(
                source_id=f"{name}#{ordinal}",
                document=name,
                text=text[start:end],
                start=start,
                end=end,
            )
        )
    return chunks


def build_index(corpus_dir: str | Path) -> KnowledgeIndex:
    directory = Path(corpus_dir)
    if not directory.is_dir():
        raise EmptyCorpus(f"corpus directory not found: {directory}")
    documents = sorted(
        child for child in directory.iterdir() if child.suffix in (".md", ".txt") and child.is_file()
    )
    if not documents:
        raise EmptyCorpus(f"no .md or .txt documents in {directory}")
    chunks: list[DocumentChunk] = []
    for document in documents:
        chunks.extend(chunk_document(document.name, document.read_text(encoding="utf-8")))
    return KnowledgeIndex(
        corpus_dir=directory,
        chunks=chunks,
        documents=[d.name for d in documents],
    )
