"""Corpus ingestion, chunking, embedding index, retrieval, context assembly."""

from __future__ import annotations

import html
import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import (ConfigurationError, DomainError, GatewayError,
                     IngestionError, RetrievalError, TransportError)
from .exemplars import cosine_similarity, unit_normalize

SOURCE_KINDS = ("pdf", "blog")

_SCRIPT_RE = re.compile(r"<(script|style)\b.*?</\1\s*>", re.IGNORECASE | re.DOTALL)
_TAG_RE = re.compile(r"<[^>]+>")


def normalize_whitespace(text: str) -> str:
    return " ".join(text.split())


def strip_html(markup: str) -> str:
    """Drop script/style blocks and tags, unescape entities, normalize spaces.

    The only transform applied to blog sources; PDFs arrive pre-extracted as
    plain text.
    """
    text = _SCRIPT_RE.sub(" ", markup)
    text = _TAG_RE.sub(" ", text)
    return normalize_whitespace(html.unescape(text))


@dataclass(frozen=True)
class Chunk:
    doc_id: str
    seq: int
    text: str
    source_kind: str
    embedding: Optional[np.ndarray] = None

    def ref(self) -> str:
        return f"{self.doc_id}:{self.seq}"

    def to_dict(self) -> dict:
        return {"doc_id": self.doc_id, "seq": self.seq, "text": self.text,
                "source_kind": self.source_kind}

    @classmethod
    def from_dict(cls, data: dict) -> "Chunk":
        return cls(data["doc_id"], int(data["seq"]), data["text"], data["source_kind"])


def ingest_document(doc_id: str, text: str, source_kind: str,
                    chunk_size: int = 1000, overlap: int = 200) -> list[Chunk]:
    """Split a document into whitespace-aligned overlapping chunks.

    Each chunk ends at the nearest whitespace at-or-before start+chunk_size
    (hard cut only when a single word spans the whole non-overlap region), and
    the next chunk starts exactly ``overlap`` characters earlier, so stripping
    the first ``overlap`` characters of every chunk after the first and
    concatenating reproduces the whitespace-normalized text.
    """
    if source_kind not in SOURCE_KINDS:
        raise ConfigurationError(f"unknown source kind {source_kind!r}")
    if overlap < 0 or overlap >= chunk_size:
        raise ConfigurationError(
            f"overlap ({overlap}) must satisfy 0 <= overlap < chunk_size ({chunk_size})")
    normalized = normalize_whitespace(text)
    if not normalized:
        raise IngestionError(f"document {doc_id!r} is empty after normalization")

    pieces: list[str] = []
    start = 0
    while True:
        raw_end = start + chunk_size
        if raw_end >= len(normalized):
            pieces.append(normalized[start:])
            break
        cut = normalized.rfind(" ", start + 1, raw_end + 1)
        # The cut must clear the overlap region or the next start cannot advance.
        end = cut if cut > start + overlap else raw_end
        pieces.append(normalized[start:end])
        start = end - overlap

    return [Chunk(doc_id=doc_id, seq=seq, text=piece, source_kind=source_kind)
            for seq, piece in enumerate(pieces)]


@dataclass(frozen=True)
class VectorIndex:
    """Embedded chunks; immutable once built, safe for concurrent retrieval."""

    chunks: tuple[Chunk, ...]
    dimension: int


@dataclass(frozen=True)
class ScoredChunk:
    chunk: Chunk
    score: float


def build_index(chunks: Sequence[Chunk], embed_backend) -> VectorIndex:
    """Embed every chunk (unit-normalized) and freeze the index."""
    if not chunks:
        raise IngestionError("cannot build an index from zero chunks")
    embedded: list[Chunk] = []
    dimension: int | None = None
    for chunk in chunks:
        try:
            vector = unit_normalize(embed_backend.embed([chunk.text])[0])
        except GatewayError as exc:
            raise TransportError(
                exc.profile, f"embedding failed for chunk {chunk.ref()}: {exc}"
            ) from exc
        if dimension is None:
            dimension = int(vector.shape[0])
        elif int(vector.shape[0]) != dimension:
            raise IngestionError(
                f"chunk {chunk.ref()} embedding dimension {vector.shape[0]} != {dimension}")
        embedded.append(Chunk(chunk.doc_id, chunk.seq, chunk.text,
                              chunk.source_kind, embedding=vector))
    return VectorIndex(chunks=tuple(embedded), dimension=dimension or 0)


def retrieve(index: VectorIndex, query_text: str, embed_backend,
             k: int) -> list[ScoredChunk]:
    """Top-k chunks by cosine similarity, descending; ties by (doc_id, seq)."""
    if k < 1:
        raise DomainError("k must be >= 1")
    if not index.chunks:
        raise RetrievalError("cannot retrieve from an empty index")
    query = unit_normalize(embed_backend.embed([query_text])[0])
    scored = [ScoredChunk(chunk=c, score=cosine_similarity(c.embedding, query))
              for c in index.chunks]
    scored.sort(key=lambda s: (-s.score, s.chunk.doc_id, s.chunk.seq))
    return scored[:k]


def select_within_budget(scored: Sequence[ScoredChunk],
                         max_chars: int) -> list[ScoredChunk]:
    """Longest prefix of ``scored`` whose blank-line-joined text fits max_chars."""
    chosen: list[ScoredChunk] = []
    used = 0
    for item in scored:
        cost = len(item.chunk.text) + (2 if chosen else 0)
        if used + cost > max_chars:
            break
        chosen.append(item)
        used += cost
    return chosen


def assemble_context(scored: Sequence[ScoredChunk], max_chars: int) -> str:
    """Join chunk texts with one blank line, truncated at whole chunks."""
    return "\n\n".join(s.chunk.text for s in select_within_budget(scored, max_chars))


def load_corpus_manifest(path: str | Path) -> list[Chunk]:
    """Read a manifest (JSON list of {doc_id, path, source_kind}) and ingest
    every document it names. Paths are resolved relative to the manifest."""
    manifest_path = Path(path)
    with open(manifest_path, encoding="utf-8") as fh:
        entries = json.load(fh)
    if not isinstance(entries, list):
        raise ConfigurationError(f"manifest {path} must be a JSON list")
    chunks: list[Chunk] = []
    for entry in entries:
        doc_path = manifest_path.parent / entry["path"]
        if not doc_path.exists():
            raise ConfigurationError(f"manifest entry {entry['doc_id']!r} points at "
                                     f"missing file {doc_path}")
        raw = doc_path.read_text(encoding="utf-8")
        kind = entry["source_kind"]
        text = strip_html(raw) if kind == "blog" else raw
        chunk_size = int(entry.get("chunk_size", 1000))
        overlap = int(entry.get("overlap", 200))
        chunks.extend(ingest_document(entry["doc_id"], text, kind,
                                      chunk_size=chunk_size, overlap=overlap))
    return chunks


def chunks_to_jsonl(chunks: Sequence[Chunk], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for chunk in chunks:
            fh.write(json.dumps(chunk.to_dict(), ensure_ascii=False) + "\n")


def chunks_from_jsonl(path: str | Path) -> list[Chunk]:
    chunks = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                chunks.append(Chunk.from_dict(json.loads(line)))
            except (json.JSONDecodeError, KeyError) as exc:
                raise IngestionError(f"{path}:{lineno}: bad chunk record ({exc})") from exc
    return chunks
