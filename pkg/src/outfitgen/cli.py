"""Operator CLI: generate, ingest, eval, serve, export."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .catalog import TripletKind, enumerate_triplets, load_vocabulary_file
from .config import RunConfig, build_deps, default_config, load_config
from .errors import ConfigurationError, EngineError
from .evaluation import (load_responses, pairwise_comparisons, rank_distribution,
                         score_alignment, write_alignment_csv, write_comparisons_csv,
                         write_means_csv, write_rank_matrix_csv)
from .gateway import backend_for
from .pipeline import (StrategyKind, load_records, run_grid, save_records,
                       write_manifest)
from .rag import chunks_to_jsonl, load_corpus_manifest

STRATEGY_FLAGS = {"zs": StrategyKind.ZS, "fs": StrategyKind.FS,
                  "cot": StrategyKind.COT, "rag-pdf": StrategyKind.RAG_PDF,
                  "rag-blog": StrategyKind.RAG_BLOG}


def _load(config_path: str | None, output_dir: str | None,
          parallelism: int | None) -> RunConfig:
    try:
        if config_path is None:
            config = default_config(output_dir or "outfitgen-out")
        else:
            config = load_config(config_path)
            if output_dir:
                config.output_dir = Path(output_dir)
        if parallelism:
            config.parallelism = parallelism
        return config
    except ConfigurationError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(2)


@click.group()
def main():
    """Outfit generation pipelines, retrieval, and survey evaluation."""


@main.command()
@click.option("--config", "config_path", type=click.Path(), default=None,
              help="JSON run config; packaged mock defaults when omitted.")
@click.option("--strategy", "strategies", multiple=True,
              type=click.Choice(sorted(STRATEGY_FLAGS)),
              help="Strategy to run (repeatable); default: all five.")
@click.option("--kind", type=click.Choice(["simple", "complex"]), default="simple",
              show_default=True, help="Which wearer-type list drives the grid.")
@click.option("--style", default=None, help="Only this style.")
@click.option("--occasion", default=None, help="Only this occasion.")
@click.option("--type", "wearer_type", default=None, help="Only this wearer type.")
@click.option("--output-dir", default=None, type=click.Path())
@click.option("--parallelism", default=None, type=int)
def generate(config_path, strategies, kind, style, occasion, wearer_type,
             output_dir, parallelism):
    """Run the triplet grid through the selected strategies."""
    config = _load(config_path, output_dir, parallelism)
    kinds = [STRATEGY_FLAGS[s] for s in strategies] if strategies \
        else list(StrategyKind)

    try:
        vocab = load_vocabulary_file(config.vocabulary_path)
    except EngineError as exc:
        click.echo(f"vocabulary error: {exc}", err=True)
        sys.exit(2)

    triplets = enumerate_triplets(vocab, TripletKind(kind))
    for name, value in (("style", style), ("occasion", occasion),
                        ("type", wearer_type)):
        if value is None:
            continue
        value = value.strip().lower()
        pool = {"style": vocab.styles, "occasion": vocab.occasions,
                "type": vocab.types_for(TripletKind(kind))}[name]
        if value not in pool:
            raise click.UsageError(
                f"--{name} {value!r} is not in the vocabulary ({', '.join(pool)})")
        attr = {"style": "style", "occasion": "occasion", "type": "wearer_type"}[name]
        triplets = [t for t in triplets if getattr(t, attr) == value]

    try:
        deps = build_deps(config, kinds)
    except EngineError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(2)

    config.output_dir.mkdir(parents=True, exist_ok=True)
    result = run_grid(triplets, kinds, deps, parallelism=config.parallelism,
                      output_dir=config.output_dir)
    save_records(result.records, config.output_dir / "records.jsonl")
    write_manifest(config.output_dir / "manifest.json", deps, result)

    click.echo(f"attempted={result.attempted} succeeded={len(result.records)} "
               f"failed={len(result.failures)}")
    for failure in result.failures[:10]:
        click.echo(f"  FAILED {failure.strategy.value} {failure.triplet.key()}: "
                   f"[{failure.stage}] {failure.message}", err=True)
    if result.failures:
        sys.exit(1)


@main.command()
@click.option("--config", "config_path", type=click.Path(), default=None)
@click.option("--output-dir", default=None, type=click.Path())
def ingest(config_path, output_dir):
    """Chunk the configured corpora and persist them as JSONL."""
    config = _load(config_path, output_dir, None)
    config.output_dir.mkdir(parents=True, exist_ok=True)
    wrote_any = False
    for kind in ("pdf", "blog"):
        manifest = config.corpus_manifests.get(kind)
        if manifest is None:
            continue
        try:
            chunks = load_corpus_manifest(manifest)
        except EngineError as exc:
            click.echo(f"ingest error ({kind}): {exc}", err=True)
            sys.exit(2)
        target = config.output_dir / f"chunks_{kind}.jsonl"
        chunks_to_jsonl(chunks, target)
        click.echo(f"{kind}: {len(chunks)} chunks -> {target}")
        wrote_any = True
    if not wrote_any:
        click.echo("no corpus manifests configured", err=True)
        sys.exit(2)


@main.command("eval")
@click.option("--config", "config_path", type=click.Path(), default=None)
@click.option("--records", "records_path", type=click.Path(), default=None,
              help="records.jsonl (default: <output-dir>/records.jsonl)")
@click.option("--responses", "responses_path", type=click.Path(), default=None,
              help="responses.jsonl from the survey service")
@click.option("--out-dir", type=click.Path(), default=None,
              help="report directory (default: <output-dir>/reports)")
def eval_cmd(config_path, records_path, responses_path, out_dir):
    """Emit alignment scores, rating means, pairwise tests, and rank matrix."""
    config = _load(config_path, None, None)
    records_file = Path(records_path) if records_path \
        else config.output_dir / "records.jsonl"
    report_dir = Path(out_dir) if out_dir else config.output_dir / "reports"
    report_dir.mkdir(parents=True, exist_ok=True)

    try:
        records = load_records(records_file)
    except (EngineError, OSError) as exc:
        click.echo(f"records error: {exc}", err=True)
        sys.exit(2)

    embed_backend = backend_for(config.profiles[config.active["embed"]])
    scores = [score_alignment(record, embed_backend) for record in records]
    write_alignment_csv(report_dir / "alignment.csv", records, scores)

    responses = []
    if responses_path:
        try:
            responses = load_responses(responses_path)
        except (EngineError, OSError) as exc:
            click.echo(f"responses error: {exc}", err=True)
            sys.exit(2)

    write_means_csv(report_dir / "ratings_means.csv", responses)
    comparisons = []
    for experiment in ("e1", "e2"):
        comparisons.extend(pairwise_comparisons(responses, experiment))
    write_comparisons_csv(report_dir / "comparisons.csv", comparisons)

    e3 = [r for r in responses if r.experiment == "e3"]
    matrix = rank_distribution(e3) if e3 else None
    path = report_dir / "rank_matrix.csv"
    if matrix is None:
        path.write_text("method,place_1,place_2,place_3,place_4,place_5\n",
                        encoding="utf-8")
    else:
        write_rank_matrix_csv(path, matrix)

    click.echo(f"records={len(records)} responses={len(responses)} "
               f"comparisons={len(comparisons)} -> {report_dir}")


@main.command()
@click.option("--config", "config_path", type=click.Path(), default=None)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
def serve(config_path, host, port):
    """Serve the survey API over the generated records."""
    import uvicorn

    from .service import create_app, load_state

    config = _load(config_path, None, None)
    state = load_state(config.output_dir, config.admin_token,
                       stimulus_cap=config.service_stimulus_cap)
    click.echo(f"serving {len(state.records)} records on {host}:{port}")
    uvicorn.run(create_app(state), host=host, port=port)


@main.command()
@click.option("--config", "config_path", type=click.Path(), default=None)
@click.option("--responses", "responses_path", type=click.Path(), default=None)
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="write to a file instead of stdout")
def export(config_path, responses_path, out_path):
    """Dump the validated response store as JSONL."""
    config = _load(config_path, None, None)
    source = Path(responses_path) if responses_path \
        else config.output_dir / "responses.jsonl"
    if not source.exists():
        click.echo(f"no responses at {source}", err=True)
        sys.exit(2)
    try:
        responses = load_responses(source)
    except EngineError as exc:
        click.echo(f"responses error: {exc}", err=True)
        sys.exit(2)
    lines = [json.dumps(r.to_dict(), ensure_ascii=False) for r in responses]
    body = "\n".join(lines) + ("\n" if lines else "")
    if out_path:
        Path(out_path).write_text(body, encoding="utf-8")
        click.echo(f"wrote {len(lines)} responses to {out_path}")
    else:
        click.echo(body, nl=False)


if __name__ == "__main__":
    main()
