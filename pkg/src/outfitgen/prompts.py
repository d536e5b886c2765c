"""Prompt templates for the five rendering modes and their substitution logic.

Template bodies are frozen strings; renders are pure functions of their inputs.
Golden copies of every render live beside the tests and are compared byte for
byte, so any edit here must be deliberate.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Mapping, Optional, Protocol, Sequence

from .catalog import Triplet
from .errors import ValidationError


class PromptKind(str, Enum):
    ZERO_SHOT = "zero_shot"
    FEW_SHOT = "few_shot"
    COT_STEP1 = "cot_step1"
    COT_STEP2 = "cot_step2"
    RAG = "rag"


# All placeholder names a template body may legally carry. Square brackets in a
# body that do not wrap one of these (e.g. the RAG [INST] markers) are literal.
PLACEHOLDER_NAMES = frozenset(
    {"style", "type", "occasion", "examples", "colors", "textures", "context", "question"}
)

ZERO_SHOT_BODY = (
    "Imagine you are an expert in fashion design. Write a description for a "
    "fashion outfit in [style] style appropriate for a [type] at a [occasion]. "
    "Be sure to address the colors and the textures."
)

COT_STEP1_QUERY = (
    "Imagine you are an expert in fashion design. Suggest the colors and the "
    "textures for a fashion outfit in [style] style appropriate for a [type] "
    "at a [occasion]."
)

FEW_SHOT_BODY = "[examples]\n\nQuestion: " + ZERO_SHOT_BODY + "\nAnswer: "

COT_STEP1_BODY = "[examples]\n\nQuestion: " + COT_STEP1_QUERY + "\nAnswer: "

COT_STEP2_BODY = (
    "Imagine you are an expert in fashion design. Write a description for a "
    "fashion outfit in [style] style appropriate for a [type] at a [occasion]. "
    "Be sure to use these colors: [colors] and these textures: [textures]."
)

RAG_BODY = (
    "[INST]<> Imagine you are a fashion expert. Always be creative and "
    "innovative. If the answer is not present in the context, make up one by "
    "yourself <> CONTEXT: [context]<> REQUEST: [question][/INST]"
)


@dataclass(frozen=True)
class PromptTemplate:
    kind: PromptKind
    body: str
    placeholders: frozenset[str]

    def __post_init__(self):
        for name in self.placeholders:
            if f"[{name}]" not in self.body:
                raise ValidationError(f"template {self.kind.value} body lacks [{name}]")
        for name in PLACEHOLDER_NAMES - self.placeholders:
            if f"[{name}]" in self.body:
                raise ValidationError(
                    f"template {self.kind.value} carries undeclared placeholder [{name}]")


TEMPLATES: dict[PromptKind, PromptTemplate] = {
    PromptKind.ZERO_SHOT: PromptTemplate(
        PromptKind.ZERO_SHOT, ZERO_SHOT_BODY, frozenset({"style", "type", "occasion"})),
    PromptKind.FEW_SHOT: PromptTemplate(
        PromptKind.FEW_SHOT, FEW_SHOT_BODY,
        frozenset({"examples", "style", "type", "occasion"})),
    PromptKind.COT_STEP1: PromptTemplate(
        PromptKind.COT_STEP1, COT_STEP1_BODY,
        frozenset({"examples", "style", "type", "occasion"})),
    PromptKind.COT_STEP2: PromptTemplate(
        PromptKind.COT_STEP2, COT_STEP2_BODY,
        frozenset({"style", "type", "occasion", "colors", "textures"})),
    PromptKind.RAG: PromptTemplate(
        PromptKind.RAG, RAG_BODY, frozenset({"context", "question"})),
}


@dataclass(frozen=True)
class RenderedPrompt:
    """A fully substituted prompt plus the provenance of its placeholders."""

    kind: PromptKind
    text: str
    bindings: Mapping[str, str]
    triplet: Optional[Triplet] = None

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "text": self.text,
                "bindings": dict(self.bindings),
                "triplet": self.triplet.to_dict() if self.triplet else None}

    @classmethod
    def from_dict(cls, data: dict) -> "RenderedPrompt":
        triplet = Triplet.from_dict(data["triplet"]) if data.get("triplet") else None
        return cls(PromptKind(data["kind"]), data["text"], dict(data["bindings"]), triplet)


def with_triplet(prompt: RenderedPrompt, triplet: Triplet) -> RenderedPrompt:
    return replace(prompt, triplet=triplet)


def _render(kind: PromptKind, bindings: Mapping[str, str],
            triplet: Optional[Triplet]) -> RenderedPrompt:
    template = TEMPLATES[kind]
    if set(bindings) != set(template.placeholders):
        raise ValidationError(
            f"bindings {sorted(bindings)} do not match template placeholders "
            f"{sorted(template.placeholders)}")
    text = template.body
    for name, value in bindings.items():
        text = text.replace(f"[{name}]", value)
    return RenderedPrompt(kind=kind, text=text, bindings=dict(bindings), triplet=triplet)


def _triplet_bindings(t: Triplet) -> dict[str, str]:
    return {"style": t.style, "type": t.wearer_type, "occasion": t.occasion}


def zero_shot_question(t: Triplet) -> str:
    """The substituted single-sentence request shared by every strategy."""
    return _render(PromptKind.ZERO_SHOT, _triplet_bindings(t), t).text


def render_zero_shot(t: Triplet) -> RenderedPrompt:
    return _render(PromptKind.ZERO_SHOT, _triplet_bindings(t), t)


class QAPair(Protocol):
    question: str
    answer: str


def format_qa(question: str, answer: str) -> str:
    """Render one demonstration block: "Question: q\\nAnswer: a"."""
    if not question or not question.strip():
        raise ValidationError("demonstration question must be non-empty")
    if not answer or not answer.strip():
        raise ValidationError("demonstration answer must be non-empty")
    return f"Question: {question}\nAnswer: {answer}"


def format_exemplar(e: QAPair) -> str:
    return format_qa(e.question, e.answer)


def _examples_block(exemplars: Sequence[QAPair]) -> str:
    if not exemplars:
        raise ValidationError("at least one demonstration is required")
    return "\n\n".join(format_exemplar(e) for e in exemplars)


def render_few_shot(t: Triplet, exemplars: Sequence[QAPair]) -> RenderedPrompt:
    """Demonstrations separated by blank lines, then the query block.

    The rendered text ends with an open "Answer: " cue inviting completion.
    """
    bindings = _triplet_bindings(t)
    bindings["examples"] = _examples_block(exemplars)
    return _render(PromptKind.FEW_SHOT, bindings, t)


def cot_step1_question(t: Triplet) -> str:
    text = COT_STEP1_QUERY
    for name, value in _triplet_bindings(t).items():
        text = text.replace(f"[{name}]", value)
    return text


def render_cot_step1(t: Triplet, exemplars: Sequence[QAPair]) -> RenderedPrompt:
    """Few-shot request for colors and textures; demonstrations answer with
    the labeled "Colors:" / "Textures:" lines the step-1 parser expects."""
    bindings = _triplet_bindings(t)
    bindings["examples"] = _examples_block(exemplars)
    return _render(PromptKind.COT_STEP1, bindings, t)


def render_cot_step2(t: Triplet, colors: Sequence[str],
                     textures: Sequence[str]) -> RenderedPrompt:
    if not colors:
        raise ValidationError("colors list is empty; step 1 must be re-run")
    if not textures:
        raise ValidationError("textures list is empty; step 1 must be re-run")
    bindings = _triplet_bindings(t)
    bindings["colors"] = ", ".join(colors)
    bindings["textures"] = ", ".join(textures)
    return _render(PromptKind.COT_STEP2, bindings, t)


def render_rag(question: str, context: str,
               triplet: Optional[Triplet] = None) -> RenderedPrompt:
    """Substitute [context] and [question]; context may legitimately be empty."""
    if not question or not question.strip():
        raise ValidationError("RAG question must be non-empty")
    return _render(PromptKind.RAG, {"context": context, "question": question}, triplet)
