"""Operator CLI: build the index, serve the gateway, ask one-shot
questions, run evaluations, and generate the synthetic fixtures."""

from __future__ import annotations

import json
from pathlib import Path

import click

from .config import AppConfig, build_engine, load_config
from .corpus import ingest_corpus, load_corpus_manifest, write_chunk_dump
from .errors import BasinbotError
from .evals import run_evaluation, write_report
from .fixtures import generate_fixtures
from .index import VectorIndex
from .providers import HashEmbedder, RuleJudge


@click.group()
def main():
    """Basin-scale water-resources assistant engine."""


@main.group()
def index():
    """Index operations."""


@index.command("build")
@click.option("--manifest", "manifest_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--chunk-size", default=1000, show_default=True)
@click.option("--overlap", default=200, show_default=True)
@click.option("--min-tail", default=200, show_default=True)
@click.option("--dimension", default=256, show_default=True)
@click.option("--dump-chunks", "dump_path", type=click.Path(), default=None,
              help="Also write a JSONL debug dump of the embedded chunks.")
def index_build(manifest_path, out_path, chunk_size, overlap, min_tail,
                dimension, dump_path):
    """Ingest a corpus manifest and write the vector index."""
    try:
        docs = load_corpus_manifest(manifest_path)
        embedder = HashEmbedder(dimension=dimension)
        embedded = ingest_corpus(docs, embedder, chunk_size, overlap, min_tail)
        idx = VectorIndex(dimension=embedder.dimension,
                          embed_model_id=embedder.model_id)
        idx.upsert(embedded)
        idx.save(out_path)
        if dump_path:
            write_chunk_dump(embedded, dump_path)
    except BasinbotError as exc:
        raise click.ClickException(f"{exc.code}: {exc}") from exc
    click.echo(f"indexed {len(docs)} documents, {len(embedded)} chunks, "
               f"{len(embedded)} vectors (d={dimension}) -> {out_path}")


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8080, show_default=True)
def serve(config_path, host, port):
    """Start the HTTP gateway."""
    import uvicorn

    from .gateway import create_app

    try:
        engine = build_engine(load_config(config_path))
    except BasinbotError as exc:
        raise click.ClickException(f"{exc.code}: {exc}") from exc
    app = create_app(engine)
    uvicorn.run(app, host=host, port=port, log_level="info")


@main.command()
@click.argument("question")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--index", "index_path", type=click.Path(exists=True), default=None,
              help="Index file (overrides the config).")
@click.option("--data", "data_manifest", type=click.Path(exists=True), default=None,
              help="Hydrology dataset manifest (overrides the config).")
@click.option("--chart-out", type=click.Path(), default="chart_spec.json",
              show_default=True, help="Where to write a chart spec when one is produced.")
def ask(question, config_path, index_path, data_manifest, chart_out):
    """One-shot question against a built index and dataset."""
    try:
        if config_path:
            config = load_config(config_path)
        else:
            if not (index_path and data_manifest):
                raise click.ClickException("need --config, or both --index and --data")
            config = AppConfig(index_path=Path(index_path),
                               data_manifest=Path(data_manifest))
        if index_path:
            config.index_path = Path(index_path)
        if data_manifest:
            config.data_manifest = Path(data_manifest)
        engine = build_engine(config)
        session_id = engine.store.create()
        answer = engine.orchestrator.run_turn(session_id, question)
    except BasinbotError as exc:
        raise click.ClickException(f"{exc.code}: {exc}") from exc

    click.echo(answer.text)
    if answer.refs:
        click.echo("")
        click.echo("References:")
        for i, ref in enumerate(answer.refs, start=1):
            click.echo(f"[{i}] {ref.label()}")
    if answer.chart_spec is not None:
        Path(chart_out).write_text(
            json.dumps(answer.chart_spec, ensure_ascii=False, indent=2) + "\n",
            encoding="utf-8")
        click.echo(f"chart spec written to {chart_out}")


@main.group("eval")
def eval_group():
    """Evaluation harness."""


@eval_group.command("run")
@click.option("--dataset", "dataset_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="Engine config; with --through-agent, questions run through the agent.")
@click.option("--through-agent", is_flag=True, default=False)
def eval_run(dataset_path, out_dir, config_path, through_agent):
    """Score a dataset and write report.json / report.csv / report.txt."""
    try:
        if config_path:
            from .config import build_judge, build_embedder
            config = load_config(config_path)
            judge = build_judge(config.judge_provider)
            embedder = build_embedder(config.embedding_provider)
        else:
            judge, embedder = RuleJudge(), HashEmbedder()
        sut = None
        if through_agent:
            if not config_path:
                raise click.ClickException("--through-agent needs --config")
            from .evals import orchestrator_sut
            engine = build_engine(config)
            sut = orchestrator_sut(engine.orchestrator, engine.store)
        report = run_evaluation(dataset_path, judge, embedder, sut=sut)
        paths = write_report(report, out_dir)
    except BasinbotError as exc:
        raise click.ClickException(f"{exc.code}: {exc}") from exc
    click.echo(report.summary_text())
    click.echo(f"report written to {paths['json'].parent}")
    if report.failures:
        click.echo(f"warning: {len(report.failures)} sample(s) failed and were excluded",
                   err=True)


@main.group()
def fixtures():
    """Synthetic fixture data."""


@fixtures.command("gen")
@click.option("--seed", default=42, show_default=True, type=int)
@click.option("--out", "out_dir", required=True, type=click.Path())
def fixtures_gen(seed, out_dir):
    """Generate the deterministic synthetic basin fixtures."""
    counts = generate_fixtures(out_dir, seed=seed)
    click.echo(f"fixtures written to {out_dir}: "
               f"{counts['stations']} stations, {counts['series_points']} series points, "
               f"{counts['thresholds']} thresholds, {counts['documents']} documents, "
               f"{counts['eval_samples']} eval samples")


if __name__ == "__main__":
    main()
