"""Shared fixtures: one generated fixture set per session, plus helpers for
deterministic engines (fixed clock, fixed session ids)."""

from __future__ import annotations

import datetime as dt
import itertools
from pathlib import Path

import pytest

from basinbot.corpus import ingest_corpus, load_corpus_manifest
from basinbot.datasets import load_datasets
from basinbot.fixtures import generate_fixtures
from basinbot.index import VectorIndex
from basinbot.providers import HashEmbedder

FIXED_TIME = dt.datetime(2025, 1, 15, 12, 0, 0, tzinfo=dt.timezone.utc)


def fixed_clock() -> dt.datetime:
    return FIXED_TIME


def make_id_factory(prefix: str = "session"):
    counter = itertools.count(1)
    return lambda: f"{prefix}-{next(counter):04d}"


@pytest.fixture(scope="session")
def fixture_dir(tmp_path_factory) -> Path:
    out = tmp_path_factory.mktemp("fixtures")
    generate_fixtures(out, seed=42)
    return out


@pytest.fixture(scope="session")
def embedder() -> HashEmbedder:
    return HashEmbedder(dimension=256)


@pytest.fixture(scope="session")
def corpus_index(fixture_dir, embedder) -> VectorIndex:
    docs = load_corpus_manifest(fixture_dir / "corpus_manifest.json")
    embedded = ingest_corpus(docs, embedder)
    index = VectorIndex(dimension=embedder.dimension, embed_model_id=embedder.model_id)
    index.upsert(embedded)
    return index


@pytest.fixture(scope="session")
def hydro_data(fixture_dir):
    return load_datasets(fixture_dir / "hydro_manifest.json")
