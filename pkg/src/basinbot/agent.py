"""The agent loop: session store, multi-round tool calling with guided
parameter elicitation, and answer export.

One turn: send the session plus all tool metadata to the chat provider;
dispatch any tool calls it makes (invalid calls get a structured
validation-error result instead of executing, which prompts the model to ask
the user for the missing details); repeat until the model produces a final
text or the round limit is hit. Every source reference on an answer comes
from a tool result in the same turn, never from the model.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
import json
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

from .errors import NothingToExport, NoTabularResult, UnknownSession
from .messages import (ConversationTurn, SourceRef, ToolResult, Transcript,
                       dedupe_refs, dumps_compact)
from .providers import ChatProvider, ChatRequest
from .tools import ToolRegistry, validate_arguments

DEFAULT_MAX_ROUNDS = 8

DEFAULT_SYSTEM_PROMPT = (
    "You are a water-resources assistant for a river basin. Prefer the "
    "registered tools over your own knowledge for any document content or "
    "hydrological data, and never invent data or sources. Cite the sources "
    "behind every answer. If a tool reports missing or invalid parameters, "
    "ask the user one clear question to obtain them. Answer in the language "
    "the user wrote in."
)

ROUND_LIMIT_TEXT = (
    "I could not complete this request within the allowed number of tool "
    "rounds. Partial results, if any, are referenced below."
)


@dataclass
class AssistantAnswer:
    text: str
    refs: list[SourceRef] = field(default_factory=list)
    chart_spec: dict[str, Any] | None = None
    table: dict[str, Any] | None = None  # last tabular tool result of the turn
    round_limit: bool = False
    new_turns: list[ConversationTurn] = field(default_factory=list)

    def to_json(self) -> dict[str, Any]:
        obj: dict[str, Any] = {"text": self.text,
                               "refs": [r.to_json() for r in self.refs]}
        if self.chart_spec is not None:
            obj["chart_spec"] = self.chart_spec
        if self.table is not None:
            obj["table"] = self.table
        if self.round_limit:
            obj["round_limit"] = True
        return obj


class SessionStore:
    """Transcripts, persisted as append-only JSON Lines per session with an
    in-memory cache in front. ``data_dir=None`` keeps sessions memory-only."""

    def __init__(self, data_dir: str | Path | None = None,
                 clock: Callable[[], dt.datetime] | None = None,
                 id_factory: Callable[[], str] | None = None):
        self.data_dir = Path(data_dir) if data_dir is not None else None
        if self.data_dir is not None:
            self.data_dir.mkdir(parents=True, exist_ok=True)
        self._clock = clock or (lambda: dt.datetime.now(dt.timezone.utc))
        self._id_factory = id_factory or (lambda: uuid.uuid4().hex)
        self._cache: dict[str, Transcript] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._global = threading.Lock()

    def _path(self, session_id: str) -> Path | None:
        return self.data_dir / f"{session_id}.jsonl" if self.data_dir else None

    def lock_for(self, session_id: str) -> threading.Lock:
        with self._global:
            return self._locks.setdefault(session_id, threading.Lock())

    def create(self, session_id: str | None = None) -> str:
        session_id = session_id or self._id_factory()
        with self._global:
            if session_id in self._cache:
                raise ValueError(f"session {session_id!r} already exists")
            transcript = Transcript(session_id=session_id,
                                    created_at=self._clock().isoformat())
            self._cache[session_id] = transcript
        path = self._path(session_id)
        if path is not None:
            with open(path, "w", encoding="utf-8") as f:
                f.write(dumps_compact({"session_id": session_id,
                                       "created_at": transcript.created_at}) + "\n")
        return session_id

    def get(self, session_id: str) -> Transcript:
        with self._global:
            if session_id in self._cache:
                return self._cache[session_id]
        path = self._path(session_id)
        if path is None or not path.exists():
            raise UnknownSession(f"unknown session {session_id!r}")
        with open(path, encoding="utf-8") as f:
            header = json.loads(f.readline())
            transcript = Transcript(session_id=header["session_id"],
                                    created_at=header["created_at"])
            for line in f:
                if line.strip():
                    transcript.turns.append(ConversationTurn.from_json(json.loads(line)))
        with self._global:
            self._cache[session_id] = transcript
        return transcript

    def append(self, session_id: str, turns: list[ConversationTurn]) -> None:
        transcript = self.get(session_id)
        transcript.turns.extend(turns)
        path = self._path(session_id)
        if path is not None:
            with open(path, "a", encoding="utf-8") as f:
                for turn in turns:
                    f.write(dumps_compact(turn.to_json()) + "\n")

    def transcript_bytes(self, session_id: str) -> bytes:
        """The session's canonical JSONL serialization (used to assert
        replay determinism)."""
        transcript = self.get(session_id)
        lines = [dumps_compact({"session_id": transcript.session_id,
                                "created_at": transcript.created_at})]
        lines += [dumps_compact(t.to_json()) for t in transcript.turns]
        return ("\n".join(lines) + "\n").encode("utf-8")


class Orchestrator:
    def __init__(self, provider: ChatProvider, registry: ToolRegistry,
                 store: SessionStore, system_prompt: str = DEFAULT_SYSTEM_PROMPT,
                 max_rounds: int = DEFAULT_MAX_ROUNDS, temperature: float = 0.0):
        self.provider = provider
        self.registry = registry
        self.store = store
        self.system_prompt = system_prompt
        self.max_rounds = max_rounds
        self.temperature = temperature

    def run_turn(self, session_id: str, user_text: str,
                 seed_prompt: str | None = None) -> AssistantAnswer:
        with self.store.lock_for(session_id):
            return self._run_turn_locked(session_id, user_text, seed_prompt)

    def _run_turn_locked(self, session_id: str, user_text: str,
                         seed_prompt: str | None) -> AssistantAnswer:
        transcript = self.store.get(session_id)
        new_turns: list[ConversationTurn] = []

        def emit(turn: ConversationTurn) -> None:
            new_turns.append(turn)
            self.store.append(session_id, [turn])

        if not transcript.turns and self.system_prompt:
            emit(ConversationTurn(role="system", text=self.system_prompt))
        if seed_prompt:
            emit(ConversationTurn(role="system", text=seed_prompt))
        emit(ConversationTurn(role="user", text=user_text))

        refs: list[SourceRef] = []
        chart: dict[str, Any] | None = None
        table: dict[str, Any] | None = None
        descriptors = self.registry.descriptors()

        for _ in range(self.max_rounds):
            response = self.provider.chat_complete(ChatRequest(
                messages=list(transcript.turns), tools=descriptors,
                temperature=self.temperature, max_rounds=self.max_rounds))

            if response.kind == "final_text":
                answer_refs = dedupe_refs(refs)
                emit(ConversationTurn(role="assistant", text=response.text,
                                      refs=answer_refs))
                return AssistantAnswer(text=response.text or "", refs=answer_refs,
                                       chart_spec=chart, table=table, new_turns=new_turns)

            emit(ConversationTurn(role="assistant", tool_calls=response.tool_calls))
            for call in response.tool_calls or []:
                payload = self._execute(call)
                emit(ConversationTurn(role="tool",
                                      tool_result=ToolResult(call.call_id, call.name,
                                                             payload)))
                if "error" not in payload:
                    refs.extend(SourceRef.from_json(r)
                                for r in payload.get("source_refs", []))
                    if "chart" in payload:
                        chart = payload["chart"]
                    if "table" in payload:
                        table = payload["table"]

        answer_refs = dedupe_refs(refs)
        emit(ConversationTurn(role="assistant", text=ROUND_LIMIT_TEXT, refs=answer_refs))
        return AssistantAnswer(text=ROUND_LIMIT_TEXT, refs=answer_refs, chart_spec=chart,
                               table=table, round_limit=True, new_turns=new_turns)

    def _execute(self, call) -> dict[str, Any]:
        entry = self.registry.get(call.name)
        if entry is None:
            return {"error": "unknown_tool",
                    "message": f"no tool named {call.name!r} is registered"}
        descriptor, handler = entry
        report = validate_arguments(descriptor, call.arguments)
        if not report.ok:
            return report.error_payload(call.name)
        try:
            return handler(call.arguments)
        except Exception as exc:  # handler errors answer the model, never crash
            return {"error": getattr(exc, "code", "handler_error"), "message": str(exc)}


# --------------------------------------------------------------------------
# export

def last_answer(transcript: Transcript) -> tuple[int, ConversationTurn] | None:
    for i in range(len(transcript.turns) - 1, -1, -1):
        turn = transcript.turns[i]
        if turn.role == "assistant" and turn.text is not None:
            return i, turn
    return None


def _chart_before(transcript: Transcript, answer_index: int) -> dict[str, Any] | None:
    for i in range(answer_index - 1, -1, -1):
        turn = transcript.turns[i]
        if turn.role == "user":
            break
        if turn.role == "tool" and turn.tool_result is not None:
            payload = turn.tool_result.payload
            if "error" not in payload and "chart" in payload:
                return payload["chart"]
    return None


def export_answer(transcript: Transcript, format: str) -> bytes:
    """Render the session's latest answer as markdown, CSV (last tabular
    tool result) or JSON."""
    found = last_answer(transcript)
    if found is None:
        raise NothingToExport("session has no assistant answer yet")
    answer_index, answer = found

    if format == "markdown":
        lines = [answer.text or ""]
        if answer.refs:
            lines += ["", "References:", ""]
            lines += [f"[{i}] {ref.label()}" for i, ref in enumerate(answer.refs, start=1)]
        return ("\n".join(lines) + "\n").encode("utf-8")

    if format == "csv":
        table = None
        for i in range(answer_index, -1, -1):
            turn = transcript.turns[i]
            if turn.role == "tool" and turn.tool_result is not None:
                payload = turn.tool_result.payload
                if "error" not in payload and "table" in payload:
                    table = payload["table"]
                    break
        if table is None:
            raise NoTabularResult("no tabular tool result to export")
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(table["columns"])
        writer.writerows([["" if cell is None else cell for cell in row]
                          for row in table["rows"]])
        return buf.getvalue().encode("utf-8")

    if format == "json":
        obj = {
            "text": answer.text,
            "refs": [r.to_json() for r in answer.refs],
            "chart_spec": _chart_before(transcript, answer_index),
        }
        return (json.dumps(obj, ensure_ascii=False, indent=2) + "\n").encode("utf-8")

    raise ValueError(f"unknown export format {format!r}")


# --------------------------------------------------------------------------
# transcript safety check (used by tests and the evaluation runner)

def check_transcript_safety(transcript: Transcript, registry: ToolRegistry) -> dict[str, int]:
    """Assert the orchestrator safety invariants over a finished transcript:
    every executed call named a registered tool and passed validation, and
    every tool turn answers a prior assistant call. Returns counters."""
    executed = 0
    pending: dict[str, Any] = {}
    for turn in transcript.turns:
        if turn.role == "assistant" and turn.tool_calls is not None:
            for call in turn.tool_calls:
                pending[call.call_id] = call
        elif turn.role == "tool" and turn.tool_result is not None:
            result = turn.tool_result
            if result.call_id not in pending:
                raise AssertionError(
                    f"tool turn {result.call_id!r} answers no prior assistant call")
            call = pending.pop(result.call_id)
            if "error" in result.payload:
                continue
            entry = registry.get(call.name)
            if entry is None:
                raise AssertionError(f"executed call to unregistered tool {call.name!r}")
            if not validate_arguments(entry[0], call.arguments).ok:
                raise AssertionError(
                    f"executed call {call.call_id!r} failed descriptor validation")
            executed += 1
    return {"executed": executed, "unanswered": len(pending)}
