"""Executes one generation job per (triplet, strategy) and persists records."""

from __future__ import annotations

import hashlib
import json
import re
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Optional, Sequence

from .catalog import Triplet
from .errors import EngineError, JobError, ParseError
from .exemplars import ExemplarStore, select_top_k
from .gateway import ImageGenRequest, TextGenRequest
from .prompts import (RenderedPrompt, cot_step1_question, render_cot_step1,
                      render_cot_step2, render_few_shot, render_rag,
                      render_zero_shot, zero_shot_question)
from .rag import VectorIndex, select_within_budget, retrieve


class StrategyKind(str, Enum):
    ZS = "zs"
    FS = "fs"
    COT = "cot"
    RAG_PDF = "rag_pdf"
    RAG_BLOG = "rag_blog"


ALL_STRATEGIES = tuple(StrategyKind)

REPROMPT_SUFFIX = "\nAnswer only with the two labeled lines."


@dataclass
class StrategyParams:
    """Knobs shared by every strategy; all surfaced through config."""

    few_shot_k: int = 2
    rag_k: int = 4
    context_max_chars: int = 4000
    image_prompt_max_chars: int = 2000
    max_tokens: int = 512
    temperature: float = 0.7
    seed: Optional[int] = 1234
    image_width: int = 64
    image_height: int = 64

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class PipelineDeps:
    """Everything a job needs: backends, stores, indices, parameters."""

    text_backend: object
    embed_backend: object
    image_backend: object
    params: StrategyParams = field(default_factory=StrategyParams)
    exemplar_store: Optional[ExemplarStore] = None
    cot_exemplar_store: Optional[ExemplarStore] = None
    indices: dict[str, VectorIndex] = field(default_factory=dict)
    profiles: dict[str, str] = field(default_factory=dict)  # capability -> name
    config_digest: str = ""


@dataclass
class GenerationRecord:
    """Full trace of one job, JSONL-serializable."""

    id: str
    triplet: Triplet
    strategy: StrategyKind
    prompts: list[RenderedPrompt]
    description: str
    image_digest: str
    image_path: str
    colors: Optional[list[str]] = None
    textures: Optional[list[str]] = None
    context_chunk_ids: list[str] = field(default_factory=list)
    clip_score: Optional[float] = None
    timings: dict[str, float] = field(default_factory=dict)
    profiles: dict[str, str] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "triplet": self.triplet.to_dict(),
            "strategy": self.strategy.value,
            "prompts": [p.to_dict() for p in self.prompts],
            "description": self.description,
            "image_digest": self.image_digest,
            "image_path": self.image_path,
            "colors": self.colors,
            "textures": self.textures,
            "context_chunk_ids": list(self.context_chunk_ids),
            "clip_score": self.clip_score,
            "timings": dict(self.timings),
            "profiles": dict(self.profiles),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GenerationRecord":
        return cls(
            id=data["id"],
            triplet=Triplet.from_dict(data["triplet"]),
            strategy=StrategyKind(data["strategy"]),
            prompts=[RenderedPrompt.from_dict(p) for p in data["prompts"]],
            description=data["description"],
            image_digest=data["image_digest"],
            image_path=data["image_path"],
            colors=data.get("colors"),
            textures=data.get("textures"),
            context_chunk_ids=list(data.get("context_chunk_ids", [])),
            clip_score=data.get("clip_score"),
            timings=dict(data.get("timings", {})),
            profiles=dict(data.get("profiles", {})),
        )


_COLORS_LINE = re.compile(r"^\s*colors\s*:\s*(.*)$", re.IGNORECASE)
_TEXTURES_LINE = re.compile(r"^\s*textures\s*:\s*(.*)$", re.IGNORECASE)


def parse_colors_textures(step1_output: str) -> tuple[list[str], list[str]]:
    """Pull the comma-separated values of the last "Colors:" and "Textures:"
    labeled lines (labels case-insensitive); items trimmed, empties dropped."""
    colors_raw: Optional[str] = None
    textures_raw: Optional[str] = None
    for line in step1_output.splitlines():
        m = _COLORS_LINE.match(line)
        if m:
            colors_raw = m.group(1)
            continue
        m = _TEXTURES_LINE.match(line)
        if m:
            textures_raw = m.group(1)
    if colors_raw is None or textures_raw is None:
        missing = [name for name, raw in (("Colors", colors_raw), ("Textures", textures_raw))
                   if raw is None]
        raise ParseError(f"missing labeled line(s): {', '.join(missing)}")
    split = lambda raw: [item.strip() for item in raw.split(",") if item.strip()]
    return split(colors_raw), split(textures_raw)


def record_id(triplet: Triplet, strategy: StrategyKind, profiles: dict[str, str],
              config_digest: str) -> str:
    """Stable id so reruns under the same config are idempotent in storage."""
    basis = json.dumps({"triplet": triplet.to_dict(), "strategy": strategy.value,
                        "profiles": dict(sorted(profiles.items())),
                        "config": config_digest}, sort_keys=True)
    return hashlib.sha256(basis.encode("utf-8")).hexdigest()[:16]


class _Stopwatch:
    def __init__(self):
        self.timings: dict[str, float] = {}

    def measure(self, stage: str):
        timings = self.timings

        class _Ctx:
            def __enter__(self_inner):
                self_inner.t0 = time.perf_counter()

            def __exit__(self_inner, *exc):
                timings[stage] = timings.get(stage, 0.0) + (
                    time.perf_counter() - self_inner.t0)
                return False

        return _Ctx()


def _guard(stage: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except EngineError as exc:
        raise JobError(stage, str(exc)) from exc


def _select_demonstrations(store: Optional[ExemplarStore], query_text: str,
                           deps: PipelineDeps, k: int, stage: str):
    if store is None or len(store) == 0:
        raise JobError(stage, "strategy requires a non-empty exemplar store")
    query_vec = _guard(stage, lambda: deps.embed_backend.embed([query_text])[0])
    return _guard(stage, select_top_k, store, query_vec, k)


def run_job(triplet: Triplet, strategy: StrategyKind, deps: PipelineDeps,
            output_dir: Optional[Path] = None) -> GenerationRecord:
    """Build the prompt for one strategy, call the backends, return the record.

    Chain-of-thought makes exactly two text calls (one automatic reprompt is
    allowed if step 1 is unparsable); every other strategy makes one.
    """
    params = deps.params
    watch = _Stopwatch()
    prompts: list[RenderedPrompt] = []
    colors: Optional[list[str]] = None
    textures: Optional[list[str]] = None
    context_chunk_ids: list[str] = []

    def text_call(prompt_text: str, stage: str) -> str:
        req = TextGenRequest(prompt=prompt_text, max_tokens=params.max_tokens,
                             temperature=params.temperature, seed=params.seed)
        with watch.measure(stage):
            return _guard(stage, deps.text_backend.generate, req)

    with watch.measure("render"):
        if strategy is StrategyKind.ZS:
            prompts = [render_zero_shot(triplet)]
        elif strategy is StrategyKind.FS:
            demos = _select_demonstrations(deps.exemplar_store,
                                           zero_shot_question(triplet), deps,
                                           params.few_shot_k, "few_shot_select")
            prompts = [render_few_shot(triplet, demos)]
        elif strategy is StrategyKind.COT:
            demos = _select_demonstrations(deps.cot_exemplar_store,
                                           cot_step1_question(triplet), deps,
                                           params.few_shot_k, "cot_select")
            prompts = [render_cot_step1(triplet, demos)]
        else:
            source = "pdf" if strategy is StrategyKind.RAG_PDF else "blog"
            index = deps.indices.get(source)
            if index is None:
                raise JobError("retrieve", f"no '{source}' index is configured")
            question = zero_shot_question(triplet)
            scored = _guard("retrieve", retrieve, index, question,
                            deps.embed_backend, params.rag_k)
            fitting = select_within_budget(scored, params.context_max_chars)
            if not fitting:
                raise JobError("retrieve",
                               "no retrieved chunk fits the context budget "
                               f"({params.context_max_chars} chars)")
            context = "\n\n".join(s.chunk.text for s in fitting)
            context_chunk_ids = [s.chunk.ref() for s in fitting]
            prompts = [render_rag(question, context, triplet=triplet)]

    if strategy is StrategyKind.COT:
        step1 = prompts[0]
        step1_output = text_call(step1.text, "text_step1")
        try:
            colors, textures = parse_colors_textures(step1_output)
            if not colors or not textures:
                raise ParseError("labeled lines parsed to empty lists")
        except ParseError:
            # One reprompt with a firmer instruction before giving up.
            from dataclasses import replace
            step1 = replace(step1, text=step1.text + REPROMPT_SUFFIX)
            step1_output = text_call(step1.text, "text_step1")
            try:
                colors, textures = parse_colors_textures(step1_output)
            except ParseError as exc:
                raise JobError("cot_parse", str(exc)) from exc
            if not colors or not textures:
                raise JobError("cot_parse", "reprompt still yielded empty lists")
        with watch.measure("render"):
            step2 = render_cot_step2(triplet, colors, textures)
        prompts = [step1, step2]
        description = text_call(step2.text, "text_step2")
    else:
        description = text_call(prompts[0].text, "text")

    if not description or not description.strip():
        raise JobError("text", "backend returned an empty description")

    image_prompt = description[:params.image_prompt_max_chars]
    image_req = ImageGenRequest(prompt=image_prompt, seed=params.seed,
                                width=params.image_width, height=params.image_height)
    with watch.measure("image"):
        image = _guard("image", deps.image_backend.generate, image_req)

    rid = record_id(triplet, strategy, deps.profiles, deps.config_digest)
    image_path = f"images/{rid}.png"
    if output_dir is not None:
        with watch.measure("persist"):
            target = Path(output_dir) / image_path
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_bytes(image.image)

    return GenerationRecord(
        id=rid, triplet=triplet, strategy=strategy, prompts=prompts,
        description=description, image_digest=image.digest, image_path=image_path,
        colors=colors, textures=textures, context_chunk_ids=context_chunk_ids,
        timings=watch.timings, profiles=dict(deps.profiles),
    )


@dataclass
class JobFailure:
    triplet: Triplet
    strategy: StrategyKind
    stage: str
    message: str

    def to_dict(self) -> dict:
        return {"triplet": self.triplet.to_dict(), "strategy": self.strategy.value,
                "stage": self.stage, "message": self.message}


@dataclass
class GridResult:
    records: list[GenerationRecord]
    failures: list[JobFailure]

    @property
    def attempted(self) -> int:
        return len(self.records) + len(self.failures)


def run_grid(triplets: Sequence[Triplet], strategies: Sequence[StrategyKind],
             deps: PipelineDeps, parallelism: int = 1,
             output_dir: Optional[Path] = None) -> GridResult:
    """One job per (triplet, strategy) pair, triplet-major order.

    Failures are collected, never aborting the grid; output order equals input
    order regardless of completion order.
    """
    if parallelism < 1:
        raise ValueError("parallelism must be >= 1")
    pairs = [(t, s) for t in triplets for s in strategies]

    def attempt(pair):
        triplet, strategy = pair
        try:
            return run_job(triplet, strategy, deps, output_dir=output_dir), None
        except JobError as exc:
            return None, JobFailure(triplet, strategy, exc.stage, str(exc))
        except EngineError as exc:
            return None, JobFailure(triplet, strategy, "unknown", str(exc))

    if parallelism == 1:
        outcomes = [attempt(pair) for pair in pairs]
    else:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            outcomes = list(pool.map(attempt, pairs))

    records = [record for record, _ in outcomes if record is not None]
    failures = [failure for _, failure in outcomes if failure is not None]
    return GridResult(records=records, failures=failures)


def save_records(records: Sequence[GenerationRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record.to_dict(), ensure_ascii=False) + "\n")


def load_records(path: str | Path) -> list[GenerationRecord]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                records.append(GenerationRecord.from_dict(json.loads(line)))
            except (json.JSONDecodeError, KeyError, ValueError) as exc:
                raise EngineError(f"{path}:{lineno}: bad record ({exc})") from exc
    return records


def write_manifest(path: str | Path, deps: PipelineDeps, result: GridResult) -> None:
    manifest = {
        "config_digest": deps.config_digest,
        "profiles": dict(deps.profiles),
        "params": deps.params.to_dict(),
        "attempted": result.attempted,
        "succeeded": len(result.records),
        "failed": len(result.failures),
        "failures": [f.to_dict() for f in result.failures],
        "created_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
