"""Configuration loading and engine assembly.

The config file is JSON; relative paths inside it resolve against the file's
directory. Provider identity (mock vs remote, model names, key env vars) is
pure configuration so the same engine runs offline or against live services.
"""

from __future__ import annotations

import datetime as dt
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

from .agent import DEFAULT_SYSTEM_PROMPT, Orchestrator, SessionStore
from .datasets import Datasets, RemoteDatasetClient, load_datasets
from .docs_plugin import DocPlugin
from .hydro import HydroPlugin
from .index import VectorIndex
from .providers import (EchoRetrievalProvider, HashEmbedder, RemoteChatProvider,
                        RemoteEmbedder, RemoteJudge, RuleJudge,
                        ScriptedChatProvider, load_script)
from .tools import ToolRegistry


@dataclass
class AppConfig:
    index_path: Path
    data_manifest: Path | None = None
    data_remote_url: str | None = None
    sessions_dir: Path | None = None
    static_dir: Path | None = None
    max_rounds: int = 8
    search_k: int = 5
    system_prompt: str | None = None
    chat_provider: dict[str, Any] = field(default_factory=lambda: {"kind": "echo"})
    embedding_provider: dict[str, Any] = field(
        default_factory=lambda: {"kind": "hash", "dimension": 256})
    judge_provider: dict[str, Any] = field(default_factory=lambda: {"kind": "rules"})


def load_config(path: str | Path) -> AppConfig:
    path = Path(path)
    with open(path, encoding="utf-8") as f:
        raw = json.load(f)
    base = path.parent

    def resolve(key: str) -> Path | None:
        value = raw.get(key)
        return (base / value) if value else None

    config = AppConfig(
        index_path=base / raw["index_path"],
        data_manifest=resolve("data_manifest"),
        data_remote_url=raw.get("data_remote_url"),
        sessions_dir=resolve("sessions_dir"),
        static_dir=resolve("static_dir"),
        max_rounds=int(raw.get("max_rounds", 8)),
        search_k=int(raw.get("search_k", 5)),
        system_prompt=raw.get("system_prompt"),
        chat_provider=raw.get("chat_provider", {"kind": "echo"}),
        embedding_provider=raw.get("embedding_provider", {"kind": "hash", "dimension": 256}),
        judge_provider=raw.get("judge_provider", {"kind": "rules"}),
    )
    script = config.chat_provider.get("script")
    if script:
        config.chat_provider = {**config.chat_provider, "script": str(base / script)}
    return config


def _api_key(spec: dict[str, Any]) -> str | None:
    env = spec.get("api_key_env")
    return os.environ.get(env) if env else None


def build_embedder(spec: dict[str, Any]):
    kind = spec.get("kind", "hash")
    if kind == "hash":
        return HashEmbedder(dimension=int(spec.get("dimension", 256)))
    if kind == "remote":
        return RemoteEmbedder(base_url=spec["base_url"], model=spec["model"],
                              dimension=int(spec["dimension"]), api_key=_api_key(spec))
    raise ValueError(f"unknown embedding provider kind {kind!r}")


def build_chat_provider(spec: dict[str, Any], search_k: int = 5):
    kind = spec.get("kind", "echo")
    if kind == "echo":
        return EchoRetrievalProvider(k=int(spec.get("k", min(3, search_k))))
    if kind == "scripted":
        return ScriptedChatProvider(load_script(spec["script"]))
    if kind == "remote":
        return RemoteChatProvider(base_url=spec["base_url"], model=spec["model"],
                                  api_key=_api_key(spec))
    raise ValueError(f"unknown chat provider kind {kind!r}")


def build_judge(spec: dict[str, Any]):
    kind = spec.get("kind", "rules")
    if kind == "rules":
        return RuleJudge()
    if kind == "remote":
        return RemoteJudge(RemoteChatProvider(base_url=spec["base_url"],
                                              model=spec["model"],
                                              api_key=_api_key(spec)))
    raise ValueError(f"unknown judge provider kind {kind!r}")


@dataclass
class Engine:
    """Everything the gateway and CLI need, assembled from one config."""

    config: AppConfig
    index: VectorIndex
    data: Datasets
    embedder: Any
    chat_provider: Any
    judge: Any
    registry: ToolRegistry
    store: SessionStore
    orchestrator: Orchestrator


def build_engine(config: AppConfig,
                 clock: Callable[[], dt.datetime] | None = None,
                 id_factory: Callable[[], str] | None = None) -> Engine:
    embedder = build_embedder(config.embedding_provider)
    chat_provider = build_chat_provider(config.chat_provider, config.search_k)
    judge = build_judge(config.judge_provider)

    index = VectorIndex.load(config.index_path)
    if config.data_remote_url:
        data = RemoteDatasetClient(config.data_remote_url).load()
    elif config.data_manifest:
        data = load_datasets(config.data_manifest)
    else:
        raise ValueError("config needs data_manifest or data_remote_url")

    store = SessionStore(config.sessions_dir, clock=clock, id_factory=id_factory)
    registry = ToolRegistry()
    DocPlugin(index, embedder, default_k=config.search_k).register(registry)
    HydroPlugin(data, clock=clock).register(registry)

    orchestrator = Orchestrator(chat_provider, registry, store,
                                system_prompt=config.system_prompt or DEFAULT_SYSTEM_PROMPT,
                                max_rounds=config.max_rounds)
    return Engine(config=config, index=index, data=data, embedder=embedder,
                  chat_provider=chat_provider, judge=judge, registry=registry,
                  store=store, orchestrator=orchestrator)
