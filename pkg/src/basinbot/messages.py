"""Conversation data: source references, turns, transcripts.

These are the shapes that cross module boundaries (providers, agent loop,
gateway, transcript files), so they live in one place and serialize to
stable JSON.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any


@dataclass(frozen=True)
class SourceRef:
    """Citation handle attached to assistant answers.

    ``kind == "document"`` points into the indexed corpus (doc_id + char span),
    ``kind == "dataset"`` records which dataset query produced a tool result.
    """

    kind: str  # "document" | "dataset"
    doc_id: str | None = None
    title: str | None = None
    char_span: tuple[int, int] | None = None
    dataset_id: str | None = None
    query_params: tuple[tuple[str, str], ...] | None = None
    retrieved_at: str | None = None

    @staticmethod
    def document(doc_id: str, title: str, char_span: tuple[int, int]) -> "SourceRef":
        return SourceRef(kind="document", doc_id=doc_id, title=title,
                         char_span=(int(char_span[0]), int(char_span[1])))

    @staticmethod
    def dataset(dataset_id: str, query_params: dict[str, Any], retrieved_at: str) -> "SourceRef":
        params = tuple(sorted((str(k), str(v)) for k, v in query_params.items()))
        return SourceRef(kind="dataset", dataset_id=dataset_id,
                         query_params=params, retrieved_at=retrieved_at)

    def to_json(self) -> dict[str, Any]:
        if self.kind == "document":
            return {
                "kind": "document",
                "doc_id": self.doc_id,
                "title": self.title,
                "char_span": list(self.char_span or ()),
            }
        return {
            "kind": "dataset",
            "dataset_id": self.dataset_id,
            "query_params": {k: v for k, v in (self.query_params or ())},
            "retrieved_at": self.retrieved_at,
        }

    @staticmethod
    def from_json(obj: dict[str, Any]) -> "SourceRef":
        if obj["kind"] == "document":
            span = obj.get("char_span") or [0, 0]
            return SourceRef.document(obj["doc_id"], obj.get("title") or "", (span[0], span[1]))
        return SourceRef.dataset(obj["dataset_id"], obj.get("query_params") or {},
                                 obj.get("retrieved_at") or "")

    def label(self) -> str:
        """One-line human-readable form, used in reference lists."""
        if self.kind == "document":
            span = self.char_span or (0, 0)
            return f"{self.title} (doc {self.doc_id}, chars {span[0]}..{span[1]})"
        params = ", ".join(f"{k}={v}" for k, v in (self.query_params or ()))
        return f"dataset {self.dataset_id} ({params}) retrieved {self.retrieved_at}"


@dataclass(frozen=True)
class ToolCall:
    """One model-issued invocation of a registered tool."""

    call_id: str
    name: str
    arguments: dict[str, Any]

    def to_json(self) -> dict[str, Any]:
        return {"call_id": self.call_id, "name": self.name, "arguments": self.arguments}

    @staticmethod
    def from_json(obj: dict[str, Any]) -> "ToolCall":
        return ToolCall(obj["call_id"], obj["name"], obj.get("arguments") or {})


@dataclass(frozen=True)
class ToolResult:
    """Payload a tool handler returned (or a structured error) for one call."""

    call_id: str
    name: str
    payload: dict[str, Any]

    def to_json(self) -> dict[str, Any]:
        return {"call_id": self.call_id, "name": self.name, "payload": self.payload}

    @staticmethod
    def from_json(obj: dict[str, Any]) -> "ToolResult":
        return ToolResult(obj["call_id"], obj["name"], obj.get("payload") or {})


@dataclass
class ConversationTurn:
    """One entry in a session: system/user text, assistant text or tool
    calls, or a tool result answering a prior assistant call."""

    role: str  # "system" | "user" | "assistant" | "tool"
    text: str | None = None
    tool_calls: list[ToolCall] | None = None
    tool_result: ToolResult | None = None
    refs: list[SourceRef] = field(default_factory=list)

    def to_json(self) -> dict[str, Any]:
        obj: dict[str, Any] = {"role": self.role}
        if self.text is not None:
            obj["text"] = self.text
        if self.tool_calls is not None:
            obj["tool_calls"] = [c.to_json() for c in self.tool_calls]
        if self.tool_result is not None:
            obj["tool_result"] = self.tool_result.to_json()
        if self.refs:
            obj["refs"] = [r.to_json() for r in self.refs]
        return obj

    @staticmethod
    def from_json(obj: dict[str, Any]) -> "ConversationTurn":
        calls = obj.get("tool_calls")
        result = obj.get("tool_result")
        return ConversationTurn(
            role=obj["role"],
            text=obj.get("text"),
            tool_calls=[ToolCall.from_json(c) for c in calls] if calls is not None else None,
            tool_result=ToolResult.from_json(result) if result is not None else None,
            refs=[SourceRef.from_json(r) for r in obj.get("refs", [])],
        )


@dataclass
class Transcript:
    """Append-only record of one session."""

    session_id: str
    created_at: str
    turns: list[ConversationTurn] = field(default_factory=list)

    def to_json(self) -> dict[str, Any]:
        return {
            "session_id": self.session_id,
            "created_at": self.created_at,
            "turns": [t.to_json() for t in self.turns],
        }


def dumps_compact(obj: Any) -> str:
    """Stable compact JSON used for transcript lines and byte-identity tests."""
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False)


def dedupe_refs(refs: list[SourceRef]) -> list[SourceRef]:
    """Drop duplicate refs, keeping first-seen order."""
    seen: set[SourceRef] = set()
    out: list[SourceRef] = []
    for r in refs:
        if r not in seen:
            seen.add(r)
            out.append(r)
    return out
