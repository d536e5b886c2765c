"""Controlled vocabulary (styles, occasions, wearer types) and the triplet grid."""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .errors import ConfigurationError, ValidationError

_VOCAB_KEYS = ("styles", "occasions", "simple_types", "complex_types")
_ARTICLES = ("a ", "an ")


def canonicalize_label(label: str) -> str:
    """Trim, collapse inner whitespace, and lowercase a vocabulary label."""
    return " ".join(str(label).split()).lower()


def strip_leading_article(label: str) -> str:
    for article in _ARTICLES:
        if label.startswith(article):
            return label[len(article):]
    return label


class TripletKind(str, Enum):
    SIMPLE = "simple"
    COMPLEX = "complex"


def _check_labels(name: str, labels: tuple[str, ...]) -> None:
    seen: set[str] = set()
    for label in labels:
        if not label or label != canonicalize_label(label):
            raise ValidationError(f"{name} label {label!r} is empty or not canonical")
        if label in seen:
            raise ValidationError(f"duplicate {name} label {label!r}", [(name, label)])
        seen.add(label)


@dataclass(frozen=True)
class Vocabulary:
    """Canonicalized label lists; immutable after construction."""

    styles: tuple[str, ...]
    occasions: tuple[str, ...]
    simple_types: tuple[str, ...]
    complex_types: tuple[str, ...]

    def __post_init__(self):
        for key in _VOCAB_KEYS:
            object.__setattr__(self, key, tuple(getattr(self, key)))
            _check_labels(key, getattr(self, key))

    def types_for(self, kind: TripletKind) -> tuple[str, ...]:
        return self.simple_types if kind is TripletKind.SIMPLE else self.complex_types


def load_vocabulary(source: dict) -> Vocabulary:
    """Build a Vocabulary from a parsed config document.

    Labels are canonicalized; occasion labels additionally lose a leading
    "a "/"an " so they compose with prompt templates that already carry the
    article. Missing or empty lists are configuration errors; duplicates after
    canonicalization are validation errors naming the duplicate.
    """
    if not isinstance(source, dict):
        raise ConfigurationError("vocabulary source must be a mapping")
    lists: dict[str, tuple[str, ...]] = {}
    for key in _VOCAB_KEYS:
        if key not in source:
            raise ConfigurationError(f"vocabulary is missing the '{key}' list")
        raw = source[key]
        if not isinstance(raw, (list, tuple)) or not raw:
            raise ConfigurationError(f"vocabulary list '{key}' must be a non-empty list")
        labels = []
        for item in raw:
            label = canonicalize_label(item)
            if key == "occasions":
                label = strip_leading_article(label)
            if not label:
                raise ValidationError(f"{key} contains an empty label")
            labels.append(label)
        dupes = {l for l in labels if labels.count(l) > 1}
        if dupes:
            dup = sorted(dupes)[0]
            raise ValidationError(f"duplicate {key} label {dup!r} after canonicalization",
                                  [(key, dup)])
        lists[key] = tuple(labels)
    return Vocabulary(**lists)


def load_vocabulary_file(path: str | Path) -> Vocabulary:
    with open(path, encoding="utf-8") as fh:
        return load_vocabulary(json.load(fh))


@dataclass(frozen=True)
class Triplet:
    """One generation target: style, occasion, and wearer type."""

    style: str
    occasion: str
    wearer_type: str
    kind: TripletKind

    def key(self) -> str:
        return f"{self.style}|{self.occasion}|{self.wearer_type}|{self.kind.value}"

    def to_dict(self) -> dict:
        return {"style": self.style, "occasion": self.occasion,
                "wearer_type": self.wearer_type, "kind": self.kind.value}

    @classmethod
    def from_dict(cls, data: dict) -> "Triplet":
        return cls(data["style"], data["occasion"], data["wearer_type"],
                   TripletKind(data["kind"]))


def enumerate_triplets(vocab: Vocabulary, kind: TripletKind) -> list[Triplet]:
    """Cartesian product styles x occasions x types-of-kind.

    Order is lexicographic in (style index, occasion index, type index), so the
    grid and derived record ids are stable across runs.
    """
    types = vocab.types_for(kind)
    return [Triplet(style, occasion, wearer, kind)
            for style in vocab.styles
            for occasion in vocab.occasions
            for wearer in types]


@dataclass(frozen=True)
class TripletValidation:
    ok: bool
    problems: tuple[tuple[str, str], ...] = ()


def validate_triplet(t: Triplet, vocab: Vocabulary) -> TripletValidation:
    """Accept iff every field is a vocabulary member of the right kind."""
    problems: list[tuple[str, str]] = []
    if t.style not in vocab.styles:
        problems.append(("style", f"{t.style!r} is not a configured style"))
    if t.occasion not in vocab.occasions:
        problems.append(("occasion", f"{t.occasion!r} is not a configured occasion"))
    expected = vocab.types_for(t.kind)
    if t.wearer_type not in expected:
        other = vocab.types_for(TripletKind.COMPLEX if t.kind is TripletKind.SIMPLE
                                else TripletKind.SIMPLE)
        if t.wearer_type in other:
            problems.append(("kind", f"{t.wearer_type!r} is not a {t.kind.value} type"))
        else:
            problems.append(("wearer_type", f"{t.wearer_type!r} is not a configured type"))
    return TripletValidation(ok=not problems, problems=tuple(problems))
