"""HTTP surface: every endpoint, error shapes, eval token gate. All requests
go through the in-process ASGI transport; no sockets, no egress."""

from __future__ import annotations

import pytest
from fastapi.testclient import TestClient

from basinbot.agent import Orchestrator, SessionStore
from basinbot.config import AppConfig, Engine
from basinbot.docs_plugin import DocPlugin
from basinbot.gateway import create_app
from basinbot.hydro import HydroPlugin
from basinbot.messages import ToolCall
from basinbot.providers import (ChatResponse, HashEmbedder, RuleJudge,
                                ScriptedChatProvider)
from basinbot.tools import ToolRegistry

from conftest import fixed_clock, make_id_factory


def make_engine(corpus_index, hydro_data, script, tmp_path=None, max_rounds=8):
    embedder = HashEmbedder(dimension=256)
    registry = ToolRegistry()
    DocPlugin(corpus_index, embedder).register(registry)
    HydroPlugin(hydro_data, clock=fixed_clock).register(registry)
    store = SessionStore(tmp_path, clock=fixed_clock, id_factory=make_id_factory())
    provider = ScriptedChatProvider(script)
    orchestrator = Orchestrator(provider, registry, store, max_rounds=max_rounds)
    config = AppConfig(index_path="unused")
    return Engine(config=config, index=corpus_index, data=hydro_data,
                  embedder=embedder, chat_provider=provider, judge=RuleJudge(),
                  registry=registry, store=store, orchestrator=orchestrator)


def make_client(corpus_index, hydro_data, script, tmp_path=None) -> TestClient:
    engine = make_engine(corpus_index, hydro_data, script, tmp_path)
    return TestClient(create_app(engine))


SEARCH_SCRIPT = [
    ChatResponse.calls([ToolCall("c1", "search_documents",
                                 {"query": "reservoir storage", "k": 2})]),
    ChatResponse.final("Storage is in the register."),
]


class TestSessionsAndMessages:
    def test_create_session(self, corpus_index, hydro_data):
        client = make_client(corpus_index, hydro_data, [])
        resp = client.post("/sessions")
        assert resp.status_code == 200
        assert resp.json()["session_id"] == "session-0001"

    def test_message_round_trip_with_refs(self, corpus_index, hydro_data):
        client = make_client(corpus_index, hydro_data, SEARCH_SCRIPT)
        session = client.post("/sessions").json()["session_id"]
        resp = client.post(f"/sessions/{session}/messages",
                           json={"text": "where is storage tracked?"})
        assert resp.status_code == 200
        body = resp.json()
        assert body["text"] == "Storage is in the register."
        assert len(body["refs"]) == 2
        assert body["refs"][0]["kind"] == "document"

    def test_unknown_session_404_with_error_shape(self, corpus_index, hydro_data):
        client = make_client(corpus_index, hydro_data, [])
        resp = client.post("/sessions/ghost/messages", json={"text": "hi"})
        assert resp.status_code == 404
        body = resp.json()
        assert body["code"] == "unknown_session"
        assert "message" in body and "detail" in body

    def test_empty_text_422(self, corpus_index, hydro_data):
        client = make_client(corpus_index, hydro_data, [])
        session = client.post("/sessions").json()["session_id"]
        resp = client.post(f"/sessions/{session}/messages", json={"text": "   "})
        assert resp.status_code == 422
        assert resp.json()["code"] == "empty_text"

    def test_missing_body_field_422(self, corpus_index, hydro_data):
        client = make_client(corpus_index, hydro_data, [])
        session = client.post("/sessions").json()["session_id"]
        resp = client.post(f"/sessions/{session}/messages", json={})
        assert resp.status_code == 422
        assert resp.json()["code"] == "validation_error"

    def test_option_seed_prompt_recorded(self, corpus_index, hydro_data, tmp_path):
        client = make_client(corpus_index, hydro_data, SEARCH_SCRIPT, tmp_path)
        session = client.post("/sessions").json()["session_id"]
        resp = client.post(f"/sessions/{session}/messages",
                           json={"text": "docs please", "option": "limpopo_library"})
        assert resp.status_code == 200
        transcript = client.get(f"/sessions/{session}/transcript").json()
        roles = [t["role"] for t in transcript["turns"]]
        assert roles[:3] == ["system", "system", "user"]

    def test_unknown_option_rejected(self, corpus_index, hydro_data):
        client = make_client(corpus_index, hydro_data, [])
        session = client.post("/sessions").json()["session_id"]
        resp = client.post(f"/sessions/{session}/messages",
                           json={"text": "x", "option": "bogus"})
        assert resp.status_code == 422
        assert resp.json()["code"] == "unknown_option"

    def test_provider_exhaustion_is_502(self, corpus_index, hydro_data):
        client = make_client(corpus_index, hydro_data, [])
        session = client.post("/sessions").json()["session_id"]
        resp = client.post(f"/sessions/{session}/messages", json={"text": "hi"})
        assert resp.status_code == 502
        assert resp.json()["code"] == "script_exhausted"

    def test_chart_spec_passthrough(self, corpus_index, hydro_data):
        script = [
            ChatResponse.calls([ToolCall("c1", "chart_spec", {
                "tool": "monthly_rainfall",
                "params": {"station_id": "RF-OLI-01", "year": 2024},
                "chart_kind": "bar"})]),
            ChatResponse.final("see chart"),
        ]
        client = make_client(corpus_index, hydro_data, script)
        session = client.post("/sessions").json()["session_id"]
        body = client.post(f"/sessions/{session}/messages",
                           json={"text": "chart it"}).json()
        assert body["chart_spec"]["kind"] == "bar"
        assert len(body["chart_spec"]["series"][0]["points"]) == 12


class TestOptions:
    def test_four_fixed_options(self, corpus_index, hydro_data):
        client = make_client(corpus_index, hydro_data, [])
        body = client.get("/options").json()
        assert [o["id"] for o in body] == [
            "limpopo_library", "realtime_analysis", "export_generate",
            "new_conversation"]
        assert all("label" in o and "seed_prompt" in o for o in body)


class TestTools:
    def test_eight_descriptors(self, corpus_index, hydro_data):
        client = make_client(corpus_index, hydro_data, [])
        body = client.get("/tools").json()
        assert len(body) == 8
        assert {d["name"] for d in body} >= {"search_documents", "monthly_rainfall"}
        assert all("parameters" in d for d in body)


class TestTranscriptAndExport:
    def test_transcript_full_json(self, corpus_index, hydro_data, tmp_path):
        client = make_client(corpus_index, hydro_data, SEARCH_SCRIPT, tmp_path)
        session = client.post("/sessions").json()["session_id"]
        client.post(f"/sessions/{session}/messages", json={"text": "q"})
        transcript = client.get(f"/sessions/{session}/transcript").json()
        assert transcript["session_id"] == session
        assert transcript["turns"][-1]["text"] == "Storage is in the register."

    def test_export_markdown(self, corpus_index, hydro_data):
        client = make_client(corpus_index, hydro_data, SEARCH_SCRIPT)
        session = client.post("/sessions").json()["session_id"]
        client.post(f"/sessions/{session}/messages", json={"text": "q"})
        resp = client.get(f"/sessions/{session}/export?format=markdown")
        assert resp.status_code == 200
        assert resp.headers["content-type"].startswith("text/markdown")
        assert "[1]" in resp.text

    def test_export_csv_conflict_when_no_table(self, corpus_index, hydro_data):
        client = make_client(corpus_index, hydro_data, SEARCH_SCRIPT)
        session = client.post("/sessions").json()["session_id"]
        client.post(f"/sessions/{session}/messages", json={"text": "q"})
        resp = client.get(f"/sessions/{session}/export?format=csv")
        assert resp.status_code == 409
        assert resp.json()["code"] == "no_tabular_result"

    def test_export_before_any_answer(self, corpus_index, hydro_data):
        client = make_client(corpus_index, hydro_data, [])
        session = client.post("/sessions").json()["session_id"]
        resp = client.get(f"/sessions/{session}/export?format=json")
        assert resp.status_code == 409
        assert resp.json()["code"] == "nothing_to_export"

    def test_export_bad_format(self, corpus_index, hydro_data):
        client = make_client(corpus_index, hydro_data, [])
        session = client.post("/sessions").json()["session_id"]
        resp = client.get(f"/sessions/{session}/export?format=xml")
        assert resp.status_code == 422


class TestEvalEndpoint:
    def test_disabled_without_env(self, corpus_index, hydro_data, fixture_dir,
                                  monkeypatch):
        monkeypatch.delenv("BASINBOT_EVAL_TOKEN", raising=False)
        client = make_client(corpus_index, hydro_data, [])
        resp = client.post("/eval/run", json={
            "dataset_path": str(fixture_dir / "eval_dataset.jsonl")})
        assert resp.status_code == 403
        assert resp.json()["code"] == "eval_disabled"

    def test_wrong_token_401(self, corpus_index, hydro_data, fixture_dir,
                             monkeypatch):
        monkeypatch.setenv("BASINBOT_EVAL_TOKEN", "sekrit")
        client = make_client(corpus_index, hydro_data, [])
        resp = client.post("/eval/run",
                           json={"dataset_path": str(fixture_dir / "eval_dataset.jsonl")},
                           headers={"X-Eval-Token": "wrong"})
        assert resp.status_code == 401

    def test_scores_dataset_with_token(self, corpus_index, hydro_data, fixture_dir,
                                       monkeypatch):
        monkeypatch.setenv("BASINBOT_EVAL_TOKEN", "sekrit")
        client = make_client(corpus_index, hydro_data, [])
        resp = client.post("/eval/run",
                           json={"dataset_path": str(fixture_dir / "eval_dataset.jsonl")},
                           headers={"X-Eval-Token": "sekrit"})
        assert resp.status_code == 200
        body = resp.json()
        assert body["n_samples"] == 30
        assert 0.0 <= body["ragas_score"] <= 1.0


class TestHealth:
    def test_healthz_reports_stats(self, corpus_index, hydro_data):
        client = make_client(corpus_index, hydro_data, [])
        body = client.get("/healthz").json()
        assert body["status"] == "ok"
        assert body["index"]["entries"] == len(corpus_index)
        assert body["datasets"]["stations"] == 26


def test_http_answer_equals_direct_run_turn_bytes(corpus_index, hydro_data):
    """Same session state + same script: the HTTP message response is
    byte-identical to the answer the CLI path (run_turn) produces."""
    import json as jsonmod

    script = [
        ChatResponse.calls([ToolCall("c1", "search_documents",
                                     {"query": "water quality", "k": 2})]),
        ChatResponse.final("Quality is summarized in the survey."),
    ]
    http_engine = make_engine(corpus_index, hydro_data, list(script))
    client = TestClient(create_app(http_engine))
    session = client.post("/sessions").json()["session_id"]
    via_http = client.post(f"/sessions/{session}/messages",
                           json={"text": "how is water quality?"}).content

    cli_engine = make_engine(corpus_index, hydro_data, list(script))
    cli_session = cli_engine.store.create()
    answer = cli_engine.orchestrator.run_turn(cli_session, "how is water quality?")
    via_cli = jsonmod.dumps(answer.to_json(), separators=(",", ":"),
                            ensure_ascii=False).encode()
    assert via_http == via_cli
