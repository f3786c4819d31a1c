"""Agent loop: registry, validation-driven elicitation, round limits,
reference faithfulness, transcript persistence and export."""

from __future__ import annotations

import json

import pytest

from basinbot.agent import (AssistantAnswer, Orchestrator, SessionStore,
                            check_transcript_safety, export_answer)
from basinbot.docs_plugin import DocPlugin
from basinbot.errors import (DuplicateName, NothingToExport, NoTabularResult,
                             UnknownSession)
from basinbot.hydro import HydroPlugin
from basinbot.messages import ToolCall
from basinbot.providers import ChatResponse, ScriptedChatProvider
from basinbot.tools import (ToolDescriptor, ToolParam, ToolRegistry,
                            validate_arguments)

from conftest import fixed_clock, make_id_factory


def build_registry(corpus_index, embedder, hydro_data):
    registry = ToolRegistry()
    DocPlugin(corpus_index, embedder).register(registry)
    HydroPlugin(hydro_data, clock=fixed_clock).register(registry)
    return registry


@pytest.fixture()
def registry(corpus_index, embedder, hydro_data):
    return build_registry(corpus_index, embedder, hydro_data)


def make_orchestrator(registry, script, tmp_path=None, max_rounds=8):
    store = SessionStore(tmp_path, clock=fixed_clock, id_factory=make_id_factory())
    provider = ScriptedChatProvider(script)
    orch = Orchestrator(provider, registry, store, max_rounds=max_rounds)
    return orch, store, provider


class TestRegistry:
    def test_two_plugins_register_eight_tools(self, registry):
        assert len(registry) == 8
        names = {d.name for d in registry.descriptors()}
        assert names == {"search_documents", "list_eflow_sites", "nearest_stations",
                         "monthly_rainfall", "compare_rainfall", "water_availability",
                         "eflow_alerts", "chart_spec"}

    def test_duplicate_name_rejected(self, registry, corpus_index, embedder):
        with pytest.raises(DuplicateName):
            DocPlugin(corpus_index, embedder).register(registry)

    def test_descriptors_round_trip_schema(self, registry):
        for descriptor in registry.descriptors():
            assert ToolDescriptor.from_schema(descriptor.to_schema()) == descriptor


class TestValidation:
    DESCRIPTOR = ToolDescriptor("t", "test tool", (
        ToolParam("station_id", "string", required=True),
        ToolParam("year", "integer", required=True),
        ToolParam("horizon", "enum", enum_values=("historical", "forecast")),
        ToolParam("params", "object"),
        ToolParam("wet", "boolean"),
        ToolParam("scale", "number"),
    ))

    def test_valid_arguments(self):
        report = validate_arguments(self.DESCRIPTOR, {
            "station_id": "S1", "year": 2024, "horizon": "forecast",
            "params": {"a": 1}, "wet": True, "scale": 1.5})
        assert report.ok

    def test_missing_required(self):
        report = validate_arguments(self.DESCRIPTOR, {"year": 2024})
        assert report.missing == ["station_id"]

    def test_type_errors(self):
        report = validate_arguments(self.DESCRIPTOR, {
            "station_id": 5, "year": "2024", "wet": "yes", "scale": True})
        bad = {e["name"] for e in report.invalid}
        assert bad == {"station_id", "year", "wet", "scale"}

    def test_bool_is_not_integer(self):
        report = validate_arguments(self.DESCRIPTOR,
                                    {"station_id": "S", "year": True})
        assert [e["name"] for e in report.invalid] == ["year"]

    def test_enum_value_checked(self):
        report = validate_arguments(self.DESCRIPTOR, {
            "station_id": "S", "year": 1, "horizon": "sideways"})
        assert [e["name"] for e in report.invalid] == ["horizon"]

    def test_unknown_argument_rejected(self):
        report = validate_arguments(self.DESCRIPTOR, {
            "station_id": "S", "year": 1, "bogus": 1})
        assert report.unknown == ["bogus"]


class TestRunTurn:
    def test_search_then_final_carries_refs(self, registry, tmp_path):
        script = [
            ChatResponse.calls([ToolCall("c1", "search_documents",
                                         {"query": "reservoir storage", "k": 3})]),
            ChatResponse.final("Storage is tracked in the register."),
        ]
        orch, store, _ = make_orchestrator(registry, script, tmp_path)
        session = store.create()
        answer = orch.run_turn(session, "what about storage?")
        assert answer.text == "Storage is tracked in the register."
        assert len(answer.refs) == 3
        assert all(r.kind == "document" for r in answer.refs)

    def test_elicitation_on_missing_parameter(self, registry, tmp_path):
        script = [
            ChatResponse.calls([ToolCall("c1", "monthly_rainfall", {"year": 2024})]),
            ChatResponse.final("Which station do you mean?"),
        ]
        orch, store, _ = make_orchestrator(registry, script, tmp_path)
        session = store.create()
        answer = orch.run_turn(session, "rainfall please")
        tool_turns = [t for t in answer.new_turns if t.role == "tool"]
        assert len(tool_turns) == 1
        payload = tool_turns[0].tool_result.payload
        assert payload["error"] == "validation_error"
        assert payload["missing"] == ["station_id"]
        assert "station_id" in payload["message"]
        # the loop continued to the model, which asked the user
        assert answer.text == "Which station do you mean?"
        assert answer.refs == []

    def test_round_limit_after_max_rounds(self, registry, tmp_path):
        script = [ChatResponse.calls([ToolCall(f"c{i}", "list_eflow_sites", {})])
                  for i in range(9)]
        orch, store, provider = make_orchestrator(registry, script, tmp_path)
        session = store.create()
        answer = orch.run_turn(session, "loop forever")
        assert answer.round_limit is True
        assert provider.calls == 8
        assert len(answer.refs) == 1  # the repeated dataset ref deduplicates

    def test_unknown_tool_becomes_error_payload(self, registry, tmp_path):
        script = [
            ChatResponse.calls([ToolCall("c1", "divine_intervention", {})]),
            ChatResponse.final("no such tool"),
        ]
        orch, store, _ = make_orchestrator(registry, script, tmp_path)
        session = store.create()
        answer = orch.run_turn(session, "do magic")
        tool_turn = next(t for t in answer.new_turns if t.role == "tool")
        assert tool_turn.tool_result.payload["error"] == "unknown_tool"
        assert answer.text == "no such tool"

    def test_handler_error_becomes_payload(self, registry, tmp_path):
        script = [
            ChatResponse.calls([ToolCall("c1", "monthly_rainfall",
                                         {"station_id": "NOPE", "year": 2024})]),
            ChatResponse.final("unknown station"),
        ]
        orch, store, _ = make_orchestrator(registry, script, tmp_path)
        session = store.create()
        answer = orch.run_turn(session, "rain at NOPE")
        tool_turn = next(t for t in answer.new_turns if t.role == "tool")
        assert tool_turn.tool_result.payload["error"] == "unknown_station"
        assert answer.refs == []

    def test_chart_and_table_surface_on_answer(self, registry, tmp_path):
        script = [
            ChatResponse.calls([ToolCall("c1", "chart_spec", {
                "tool": "compare_rainfall",
                "params": {"station_id": "RF-OLI-01", "year_a": 2023, "year_b": 2024},
                "chart_kind": "grouped_bar"})]),
            ChatResponse.final("chart below"),
        ]
        orch, store, _ = make_orchestrator(registry, script, tmp_path)
        session = store.create()
        answer = orch.run_turn(session, "compare years")
        assert answer.chart_spec is not None
        assert answer.chart_spec["kind"] == "grouped_bar"
        assert len(answer.refs) == 1 and answer.refs[0].kind == "dataset"

    def test_refs_trace_to_tool_results(self, registry, tmp_path):
        script = [
            ChatResponse.calls([ToolCall("c1", "search_documents", {"query": "aquifer"}),
                                ToolCall("c2", "list_eflow_sites", {})]),
            ChatResponse.final("combined answer"),
        ]
        orch, store, _ = make_orchestrator(registry, script, tmp_path)
        session = store.create()
        answer = orch.run_turn(session, "everything")
        produced = []
        for turn in answer.new_turns:
            if turn.role == "tool" and "error" not in turn.tool_result.payload:
                produced.extend(json.dumps(r, sort_keys=True)
                                for r in turn.tool_result.payload["source_refs"])
        for ref in answer.refs:
            assert json.dumps(ref.to_json(), sort_keys=True) in produced

    def test_unknown_session_raises(self, registry, tmp_path):
        orch, _, _ = make_orchestrator(registry, [ChatResponse.final("x")], tmp_path)
        with pytest.raises(UnknownSession):
            orch.run_turn("ghost", "hello")

    def test_transcript_safety_checker(self, registry, tmp_path):
        script = [
            ChatResponse.calls([ToolCall("c1", "search_documents", {"query": "x"})]),
            ChatResponse.calls([ToolCall("c2", "monthly_rainfall", {"year": 1})]),
            ChatResponse.final("done"),
        ]
        orch, store, _ = make_orchestrator(registry, script, tmp_path)
        session = store.create()
        orch.run_turn(session, "q")
        stats = check_transcript_safety(store.get(session), registry)
        assert stats == {"executed": 1, "unanswered": 0}


class TestTranscriptPersistence:
    def test_replay_is_byte_identical(self, registry, tmp_path):
        def run(base):
            script = [
                ChatResponse.calls([ToolCall("c1", "search_documents",
                                             {"query": "storage", "k": 2})]),
                ChatResponse.final("answer one"),
            ]
            orch, store, _ = make_orchestrator(registry, script, base)
            session = store.create()
            orch.run_turn(session, "tell me about storage")
            return store.transcript_bytes(session)

        a = run(tmp_path / "a")
        b = run(tmp_path / "b")
        assert a == b

    def test_reload_from_disk(self, registry, tmp_path):
        script = [ChatResponse.final("remembered")]
        orch, store, _ = make_orchestrator(registry, script, tmp_path)
        session = store.create()
        orch.run_turn(session, "hi")

        fresh = SessionStore(tmp_path, clock=fixed_clock)
        transcript = fresh.get(session)
        assert transcript.turns[-1].text == "remembered"
        assert transcript.turns[0].role == "system"

    def test_memory_only_sessions(self, registry):
        orch, store, _ = make_orchestrator(registry, [ChatResponse.final("ok")], None)
        session = store.create()
        assert orch.run_turn(session, "hello").text == "ok"

    def test_concurrent_turns_on_distinct_sessions(self, registry, tmp_path):
        import threading

        script = [ChatResponse.final(f"answer-{i}") for i in range(8)]
        orch, store, _ = make_orchestrator(registry, script, tmp_path)
        sessions = [store.create() for _ in range(8)]
        answers: dict[str, str] = {}
        lock = threading.Lock()

        def worker(session_id):
            answer = orch.run_turn(session_id, "go")
            with lock:
                answers[session_id] = answer.text

        threads = [threading.Thread(target=worker, args=(s,)) for s in sessions]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        # every session got exactly one scripted answer; no turn interleaving
        assert sorted(answers.values()) == sorted(f"answer-{i}" for i in range(8))
        for session_id in sessions:
            turns = store.get(session_id).turns
            assert [t.role for t in turns] == ["system", "user", "assistant"]


class TestExport:
    def _session_with_rainfall(self, registry, tmp_path):
        script = [
            ChatResponse.calls([ToolCall("c1", "monthly_rainfall",
                                         {"station_id": "RF-OLI-01", "year": 2024})]),
            ChatResponse.final("tabulated"),
        ]
        orch, store, _ = make_orchestrator(registry, script, tmp_path)
        session = store.create()
        orch.run_turn(session, "rainfall 2024")
        return store.get(session)

    def test_markdown_numbered_refs(self, registry, tmp_path):
        script = [
            ChatResponse.calls([ToolCall("c1", "search_documents",
                                         {"query": "pollution", "k": 2})]),
            ChatResponse.final("two sources say so"),
        ]
        orch, store, _ = make_orchestrator(registry, script, tmp_path)
        session = store.create()
        orch.run_turn(session, "pollution?")
        md = export_answer(store.get(session), "markdown").decode()
        assert "two sources say so" in md
        assert "[1]" in md and "[2]" in md

    def test_csv_exports_last_table(self, registry, tmp_path):
        transcript = self._session_with_rainfall(registry, tmp_path)
        body = export_answer(transcript, "csv").decode()
        lines = body.strip().splitlines()
        assert lines[0] == "month,min_mm,max_mm,avg_mm,total_mm"
        assert len(lines) == 13  # header + 12 months

    def test_csv_without_table_rejected(self, registry, tmp_path):
        orch, store, _ = make_orchestrator(registry, [ChatResponse.final("plain")],
                                           tmp_path)
        session = store.create()
        orch.run_turn(session, "hi")
        with pytest.raises(NoTabularResult):
            export_answer(store.get(session), "csv")

    def test_fresh_session_nothing_to_export(self, registry, tmp_path):
        orch, store, _ = make_orchestrator(registry, [], tmp_path)
        session = store.create()
        with pytest.raises(NothingToExport):
            export_answer(store.get(session), "markdown")

    def test_json_is_full_answer(self, registry, tmp_path):
        transcript = self._session_with_rainfall(registry, tmp_path)
        obj = json.loads(export_answer(transcript, "json"))
        assert obj["text"] == "tabulated"
        assert obj["refs"][0]["kind"] == "dataset"
