"""Few-shot demonstration store and cosine-similarity selection."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
import numpy as np

from .errors import DomainError, StoreError
from .prompts import format_qa

NORM_TOLERANCE = 1e-6


def cosine_similarity(u, v) -> float:
    """(u . v) / (|u| |v|); raises DomainError on shape or zero-norm inputs."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape or u.ndim != 1:
        raise DomainError(f"vector shapes differ: {u.shape} vs {v.shape}")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise DomainError("cosine similarity is undefined for zero-norm vectors")
    return float(np.dot(u, v) / (nu * nv))


def unit_normalize(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    norm = float(np.linalg.norm(v))
    if norm == 0.0:
        raise DomainError("cannot normalize a zero-norm vector")
    return v / norm


@dataclass(frozen=True)
class Exemplar:
    """One stored Question/Answer demonstration with its unit embedding."""

    id: str
    question: str
    answer: str
    embedding: np.ndarray

    def block_text(self) -> str:
        return format_qa(self.question, self.answer)


class ExemplarStore:
    """Append-only demonstration database; single writer, free readers."""

    def __init__(self):
        self._items: list[Exemplar] = []
        self._ids: set[str] = set()
        self._dimension: int | None = None

    def __len__(self) -> int:
        return len(self._items)

    @property
    def exemplars(self) -> tuple[Exemplar, ...]:
        return tuple(self._items)

    @property
    def dimension(self) -> int | None:
        return self._dimension

    def append(self, exemplar: Exemplar) -> None:
        if exemplar.id in self._ids:
            raise StoreError(f"duplicate exemplar id {exemplar.id!r}")
        dim = int(exemplar.embedding.shape[0])
        if self._dimension is None:
            self._dimension = dim
        elif dim != self._dimension:
            raise StoreError(
                f"embedding dimension {dim} does not match store dimension "
                f"{self._dimension}")
        norm = float(np.linalg.norm(exemplar.embedding))
        if abs(norm - 1.0) > NORM_TOLERANCE:
            raise StoreError(f"exemplar {exemplar.id!r} embedding is not unit-norm")
        self._items.append(exemplar)
        self._ids.add(exemplar.id)


def add_exemplar(store: ExemplarStore, question: str, answer: str,
                 embed_backend, exemplar_id: str | None = None) -> Exemplar:
    """Embed the full Question/Answer block and append it to the store.

    The embedded text is exactly what selection later compares against, so the
    answer's style and occasion signal participates in matching.
    """
    block = format_qa(question, answer)
    vector = unit_normalize(embed_backend.embed([block])[0])
    if exemplar_id is None:
        exemplar_id = f"ex-{len(store) + 1:03d}"
    exemplar = Exemplar(id=exemplar_id, question=question, answer=answer,
                        embedding=vector)
    store.append(exemplar)
    return exemplar


def select_top_k(store: ExemplarStore, query_embedding, k: int) -> list[Exemplar]:
    """The k store entries most cosine-similar to the query, descending.

    Ties break by insertion order (earlier wins); k larger than the store
    returns everything.
    """
    if k < 0:
        raise DomainError("k must be >= 0")
    if k == 0 or len(store) == 0:
        return []
    query = np.asarray(query_embedding, dtype=float)
    if store.dimension is not None and query.shape != (store.dimension,):
        raise DomainError(
            f"query dimension {query.shape} does not match store dimension "
            f"({store.dimension},)")
    items = store.exemplars
    sims = [cosine_similarity(e.embedding, query) for e in items]
    order = sorted(range(len(items)), key=lambda i: (-sims[i], i))
    return [items[i] for i in order[:k]]


def load_exemplar_file(path: str | Path, embed_backend) -> ExemplarStore:
    """Load a JSONL file of {id, question, answer}; embeddings are computed
    at load time because they depend on the embed backend."""
    store = ExemplarStore()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise StoreError(f"{path}:{lineno}: invalid JSON ({exc})") from exc
            add_exemplar(store, row["question"], row["answer"], embed_backend,
                         exemplar_id=row.get("id"))
    return store
