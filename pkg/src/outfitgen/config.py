"""Run configuration: file loading, flag overrides, digests, dependency wiring."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional

from .catalog import Vocabulary, load_vocabulary_file
from .errors import ConfigurationError
from .exemplars import ExemplarStore, load_exemplar_file
from .gateway import BackendProfile, backend_for
from .pipeline import PipelineDeps, StrategyParams
from .rag import build_index, load_corpus_manifest


def packaged_data_path(*parts: str) -> Path:
    return Path(resources.files("outfitgen").joinpath("data", *parts))


@dataclass
class RunConfig:
    """Everything a generation or evaluation run needs, path-resolved."""

    vocabulary_path: Path
    exemplars_path: Path
    cot_exemplars_path: Path
    corpus_manifests: dict[str, Optional[Path]]  # "pdf"/"blog" -> manifest
    profiles: dict[str, BackendProfile]
    active: dict[str, str]  # capability -> profile name
    params: StrategyParams
    output_dir: Path
    parallelism: int = 4
    admin_token: str = "change-me"
    service_stimulus_cap: int = 25

    def digest(self) -> str:
        basis = {
            "profiles": {name: {"endpoint": p.endpoint, "capability": p.capability,
                                "options": p.options}
                         for name, p in sorted(self.profiles.items())},
            "active": dict(sorted(self.active.items())),
            "params": self.params.to_dict(),
        }
        blob = json.dumps(basis, sort_keys=True).encode("utf-8")
        return hashlib.sha256(blob).hexdigest()[:16]


def default_config(output_dir: str | Path = "outfitgen-out") -> RunConfig:
    """All-mock configuration over the packaged vocabulary, exemplars, corpora."""
    return RunConfig(
        vocabulary_path=packaged_data_path("vocabulary.json"),
        exemplars_path=packaged_data_path("exemplars.jsonl"),
        cot_exemplars_path=packaged_data_path("cot_exemplars.jsonl"),
        corpus_manifests={
            "pdf": packaged_data_path("corpus", "pdf_manifest.json"),
            "blog": packaged_data_path("corpus", "blog_manifest.json"),
        },
        profiles={
            "mock-text": BackendProfile("mock-text", "mock", "text"),
            "mock-embed": BackendProfile("mock-embed", "mock", "embed",
                                         options={"dim": 64}),
            "mock-image": BackendProfile("mock-image", "mock", "image"),
        },
        active={"text": "mock-text", "embed": "mock-embed", "image": "mock-image"},
        params=StrategyParams(),
        output_dir=Path(output_dir),
    )


def _resolve(base: Path, value: str) -> Path:
    path = Path(value)
    return path if path.is_absolute() else (base / path)


def load_config(path: str | Path, overrides: Optional[dict] = None) -> RunConfig:
    """Parse a JSON config file; override values win over file values.

    Relative paths are resolved against the config file's directory. Referenced
    data paths must exist; strategy-active profile names must be defined.
    """
    config_path = Path(path)
    try:
        with open(config_path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigurationError(f"config file not found: {config_path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config file is not valid JSON: {exc}") from exc
    if overrides:
        raw = {**raw, **{k: v for k, v in overrides.items() if v is not None}}
    base = config_path.parent

    defaults = default_config()

    def data_path(key: str, fallback: Path) -> Path:
        if key in raw:
            resolved = _resolve(base, raw[key])
        else:
            resolved = fallback
        if not resolved.exists():
            raise ConfigurationError(f"{key} path does not exist: {resolved}")
        return resolved

    vocabulary_path = data_path("vocabulary", defaults.vocabulary_path)
    exemplars_path = data_path("exemplars", defaults.exemplars_path)
    cot_path = data_path("cot_exemplars", defaults.cot_exemplars_path)

    manifests: dict[str, Optional[Path]] = {}
    raw_corpus = raw.get("corpus", {})
    for kind in ("pdf", "blog"):
        if kind in raw_corpus:
            if raw_corpus[kind] is None:
                manifests[kind] = None
                continue
            resolved = _resolve(base, raw_corpus[kind])
            if not resolved.exists():
                raise ConfigurationError(f"corpus.{kind} manifest missing: {resolved}")
            manifests[kind] = resolved
        else:
            manifests[kind] = defaults.corpus_manifests[kind]

    profiles: dict[str, BackendProfile] = {}
    for name, entry in raw.get("profiles", {}).items():
        profiles[name] = BackendProfile(
            name=name, endpoint=entry["endpoint"], capability=entry["capability"],
            timeout=float(entry.get("timeout", 30.0)), retry=int(entry.get("retry", 2)),
            options=dict(entry.get("options", {})))
    if not profiles:
        profiles = defaults.profiles

    active = {**defaults.active, **raw.get("active", {})}
    for capability, name in active.items():
        if name not in profiles:
            raise ConfigurationError(
                f"active {capability} profile {name!r} is not defined")
        if profiles[name].capability != capability:
            raise ConfigurationError(
                f"profile {name!r} has capability {profiles[name].capability!r}, "
                f"not {capability!r}")

    params = StrategyParams(**{**StrategyParams().to_dict(), **raw.get("params", {})})

    return RunConfig(
        vocabulary_path=vocabulary_path,
        exemplars_path=exemplars_path,
        cot_exemplars_path=cot_path,
        corpus_manifests=manifests,
        profiles=profiles,
        active=active,
        params=params,
        output_dir=_resolve(base, raw.get("output_dir", "outfitgen-out")),
        parallelism=int(raw.get("parallelism", 4)),
        admin_token=str(raw.get("admin_token", "change-me")),
        service_stimulus_cap=int(raw.get("service_stimulus_cap", 25)),
    )


def load_vocab(config: RunConfig) -> Vocabulary:
    return load_vocabulary_file(config.vocabulary_path)


def build_deps(config: RunConfig, strategies=None) -> PipelineDeps:
    """Instantiate backends, load exemplar stores, and build the RAG indices.

    ``strategies`` (when given) limits the expensive pieces to what the run
    actually needs.
    """
    from .pipeline import StrategyKind

    wanted = set(strategies) if strategies else set(StrategyKind)
    text_profile = config.profiles[config.active["text"]]
    embed_profile = config.profiles[config.active["embed"]]
    image_profile = config.profiles[config.active["image"]]
    embed_backend = backend_for(embed_profile)

    exemplar_store: Optional[ExemplarStore] = None
    if StrategyKind.FS in wanted:
        exemplar_store = load_exemplar_file(config.exemplars_path, embed_backend)
    cot_store: Optional[ExemplarStore] = None
    if StrategyKind.COT in wanted:
        cot_store = load_exemplar_file(config.cot_exemplars_path, embed_backend)

    indices = {}
    for kind, strategy in (("pdf", StrategyKind.RAG_PDF), ("blog", StrategyKind.RAG_BLOG)):
        manifest = config.corpus_manifests.get(kind)
        if strategy in wanted and manifest is not None:
            indices[kind] = build_index(load_corpus_manifest(manifest), embed_backend)

    return PipelineDeps(
        text_backend=backend_for(text_profile),
        embed_backend=embed_backend,
        image_backend=backend_for(image_profile),
        params=config.params,
        exemplar_store=exemplar_store,
        cot_exemplar_store=cot_store,
        indices=indices,
        profiles={"text": text_profile.name, "embed": embed_profile.name,
                  "image": image_profile.name},
        config_digest=config.digest(),
    )
