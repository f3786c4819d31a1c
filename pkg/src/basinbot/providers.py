"""Model provider contracts and implementations.

Three capabilities, each with a deterministic offline implementation and an
HTTP-backed one speaking the common OpenAI-compatible wire format:

- text embedding   (HashEmbedder / RemoteEmbedder)
- chat completion with tool calling
  (ScriptedChatProvider, EchoRetrievalProvider / RemoteChatProvider)
- judge verdicts used by the evaluation metrics (RuleJudge / RemoteJudge)
"""

from __future__ import annotations

import json
import re
import threading
from dataclasses import dataclass, field
from typing import Any, Protocol, Sequence

import httpx
import numpy as np

from .errors import ProviderFailure, ScriptExhausted
from .messages import ConversationTurn, ToolCall
from .tools import ToolDescriptor


# --------------------------------------------------------------------------
# chat contracts

@dataclass
class ChatRequest:
    messages: list[ConversationTurn]
    tools: list[ToolDescriptor] = field(default_factory=list)
    temperature: float = 0.0
    max_rounds: int | None = None


@dataclass
class ChatResponse:
    kind: str  # "final_text" | "tool_calls"
    text: str | None = None
    tool_calls: list[ToolCall] | None = None

    def __post_init__(self):
        if self.kind == "final_text" and (self.text is None or self.tool_calls is not None):
            raise ValueError("final_text response must carry text only")
        if self.kind == "tool_calls" and (self.tool_calls is None or self.text is not None):
            raise ValueError("tool_calls response must carry tool_calls only")

    @staticmethod
    def final(text: str) -> "ChatResponse":
        return ChatResponse(kind="final_text", text=text)

    @staticmethod
    def calls(tool_calls: list[ToolCall]) -> "ChatResponse":
        return ChatResponse(kind="tool_calls", tool_calls=tool_calls)


@dataclass
class JudgeVerdict:
    task: str
    payload: Any  # bool for the boolean tasks, list[str] for the generative ones


class ChatProvider(Protocol):
    def chat_complete(self, req: ChatRequest) -> ChatResponse: ...


class EmbeddingProvider(Protocol):
    dimension: int
    model_id: str

    def embed_texts(self, texts: Sequence[str]) -> list[np.ndarray]: ...


JUDGE_TASKS = ("statement_supported", "chunk_relevant",
               "statement_decomposition", "question_generation")


class JudgeProvider(Protocol):
    def judge(self, task: str, inputs: dict[str, Any]) -> JudgeVerdict: ...


# --------------------------------------------------------------------------
# deterministic mock embedder

FNV_OFFSET = 2166136261
FNV_PRIME = 16777619


def fnv1a_32(data: bytes) -> int:
    h = FNV_OFFSET
    for b in data:
        h ^= b
        h = (h * FNV_PRIME) & 0xFFFFFFFF
    return h


def _tokens(text: str) -> list[str]:
    return [t for t in re.split(r"[^a-z0-9]+", text.lower()) if t]


class HashEmbedder:
    """Feature-hashing bag-of-words embedder.

    Each lowercased token is FNV-1a hashed; the hash picks a bucket (mod d)
    and its parity picks the sign. The bucket counts are L2-normalized.
    Cheap, fully deterministic, and gives nontrivial cosine geometry.
    """

    def __init__(self, dimension: int = 256):
        self.dimension = dimension
        self.model_id = f"hash-embed-v1-d{dimension}"

    def embed_one(self, text: str) -> np.ndarray:
        vec = np.zeros(self.dimension, dtype=np.float64)
        for tok in _tokens(text):
            h = fnv1a_32(tok.encode("utf-8"))
            sign = 1.0 if h % 2 == 0 else -1.0
            vec[h % self.dimension] += sign
        norm = float(np.linalg.norm(vec))
        if norm > 0.0:
            vec /= norm
        return vec.astype(np.float32)

    def embed_texts(self, texts: Sequence[str]) -> list[np.ndarray]:
        return [self.embed_one(t) for t in texts]


# --------------------------------------------------------------------------
# scripted chat provider (replays a fixed response sequence)

class ScriptedChatProvider:
    """Replays a programmed list of responses, one per chat_complete call.

    Script position advances under a lock so concurrent callers still get
    each entry exactly once. Running past the script raises ScriptExhausted.
    """

    def __init__(self, script: Sequence[ChatResponse]):
        self._script = list(script)
        self._pos = 0
        self._lock = threading.Lock()
        self.calls = 0

    def chat_complete(self, req: ChatRequest) -> ChatResponse:
        if not req.messages:
            raise ValueError("chat request must carry at least one message")
        with self._lock:
            self.calls += 1
            if self._pos >= len(self._script):
                raise ScriptExhausted(
                    f"scripted provider exhausted after {len(self._script)} responses")
            resp = self._script[self._pos]
            self._pos += 1
        return resp


def load_script(path: str) -> list[ChatResponse]:
    """Read a script file: JSON array of final_text / tool_calls entries."""
    with open(path, encoding="utf-8") as f:
        entries = json.load(f)
    script: list[ChatResponse] = []
    for i, entry in enumerate(entries):
        if entry["kind"] == "final_text":
            script.append(ChatResponse.final(entry["text"]))
        elif entry["kind"] == "tool_calls":
            calls = [ToolCall(call_id=c.get("call_id", f"call-{i}-{j}"),
                              name=c["tool"], arguments=c.get("arguments", {}))
                     for j, c in enumerate(entry["calls"])]
            script.append(ChatResponse.calls(calls))
        else:
            raise ValueError(f"script entry {i}: unknown kind {entry['kind']!r}")
    return script


# --------------------------------------------------------------------------
# echo-retrieval chat provider (rule-based offline default)

class EchoRetrievalProvider:
    """Offline chat provider with a fixed policy: search the document index
    for the latest user question, then answer with the top snippet.

    Lets the CLI and gateway run end to end with zero scripting and zero
    network; the answer text is a deterministic function of the tool result.
    """

    def __init__(self, k: int = 3):
        self.k = k

    def chat_complete(self, req: ChatRequest) -> ChatResponse:
        if not req.messages:
            raise ValueError("chat request must carry at least one message")
        last_user = None
        searched = None
        for turn in req.messages:
            if turn.role == "user":
                last_user = turn.text or ""
                searched = None
            elif turn.role == "tool" and turn.tool_result is not None \
                    and turn.tool_result.name == "search_documents":
                searched = turn.tool_result.payload
        if last_user is None:
            return ChatResponse.final("Please ask a question.")
        if searched is None:
            call = ToolCall(call_id=f"echo-{len(req.messages)}",
                            name="search_documents",
                            arguments={"query": last_user, "k": self.k})
            return ChatResponse.calls([call])
        if searched.get("error"):
            return ChatResponse.final(
                f"I could not search the documents: {searched.get('message', 'unknown error')}")
        snippets = searched.get("snippets") or []
        if not snippets:
            return ChatResponse.final(
                "No matching documents were found for your question.")
        return ChatResponse.final(
            "Based on the indexed documents: " + snippets[0]["text"])


# --------------------------------------------------------------------------
# rule-based judge

_STOPWORDS = frozenset({
    "the", "and", "for", "are", "was", "were", "with", "that", "this",
    "from", "has", "have", "had", "not", "but", "its", "into", "all",
    "per", "their", "our", "you", "your",
})


def normalize_text(text: str) -> str:
    """Lowercase and collapse whitespace; the support check is substring
    containment over this form."""
    return re.sub(r"\s+", " ", text.lower()).strip()


def content_words(text: str) -> set[str]:
    return {t for t in _tokens(text) if len(t) >= 3 and t not in _STOPWORDS}


def split_statements(text: str) -> list[str]:
    """Split on sentence terminators, keeping the terminator with its
    sentence; pieces without any word character are dropped."""
    pieces = re.findall(r"[^.!?]+[.!?]?", text)
    return [p.strip() for p in pieces if re.search(r"\w", p)]


class RuleJudge:
    """Deterministic judge: every verdict is a pure function of its inputs,
    which makes the evaluation metrics bit-exactly testable offline."""

    def statement_supported(self, statement: str, context: str) -> bool:
        stmt = normalize_text(statement)
        return bool(stmt) and stmt in normalize_text(context)

    def chunk_relevant(self, chunk: str, ground_truth: str) -> bool:
        return len(content_words(chunk) & content_words(ground_truth)) >= 3

    def statement_decomposition(self, text: str) -> list[str]:
        return split_statements(text)

    def question_generation(self, answer: str, n: int) -> list[str]:
        statements = split_statements(answer)
        if not statements:
            return []
        stem = statements[0].rstrip(".!?").strip()
        return [("What " if i % 2 == 0 else "When ") + stem + "?" for i in range(n)]

    def judge(self, task: str, inputs: dict[str, Any]) -> JudgeVerdict:
        if task == "statement_supported":
            return JudgeVerdict(task, self.statement_supported(inputs["statement"], inputs["context"]))
        if task == "chunk_relevant":
            return JudgeVerdict(task, self.chunk_relevant(inputs["chunk"], inputs["ground_truth"]))
        if task == "statement_decomposition":
            return JudgeVerdict(task, self.statement_decomposition(inputs["text"]))
        if task == "question_generation":
            return JudgeVerdict(task, self.question_generation(inputs["answer"], inputs.get("n", 3)))
        raise ValueError(f"unknown judge task {task!r}")


# --------------------------------------------------------------------------
# remote providers (OpenAI-compatible wire format)

def _turn_to_wire(turn: ConversationTurn) -> dict[str, Any]:
    if turn.role == "tool" and turn.tool_result is not None:
        return {
            "role": "tool",
            "tool_call_id": turn.tool_result.call_id,
            "content": json.dumps(turn.tool_result.payload, ensure_ascii=False),
        }
    if turn.role == "assistant" and turn.tool_calls is not None:
        return {
            "role": "assistant",
            "content": None,
            "tool_calls": [
                {
                    "id": c.call_id,
                    "type": "function",
                    "function": {"name": c.name,
                                 "arguments": json.dumps(c.arguments, ensure_ascii=False)},
                }
                for c in turn.tool_calls
            ],
        }
    return {"role": turn.role, "content": turn.text or ""}


def build_chat_payload(req: ChatRequest, model: str) -> dict[str, Any]:
    payload: dict[str, Any] = {
        "model": model,
        "temperature": req.temperature,
        "messages": [_turn_to_wire(t) for t in req.messages],
    }
    if req.tools:
        payload["tools"] = [{"type": "function", "function": d.to_schema()}
                            for d in req.tools]
    return payload


def parse_chat_response(body: dict[str, Any]) -> ChatResponse:
    try:
        message = body["choices"][0]["message"]
    except (KeyError, IndexError, TypeError) as exc:
        raise ProviderFailure(f"malformed chat completion response: {exc}") from exc
    wire_calls = message.get("tool_calls")
    if wire_calls:
        calls = []
        for c in wire_calls:
            try:
                args = json.loads(c["function"]["arguments"] or "{}")
            except json.JSONDecodeError as exc:
                raise ProviderFailure(f"tool call arguments are not valid JSON: {exc}") from exc
            calls.append(ToolCall(call_id=c.get("id", ""), name=c["function"]["name"],
                                  arguments=args))
        return ChatResponse.calls(calls)
    content = message.get("content")
    if content is None:
        raise ProviderFailure("chat completion carried neither content nor tool calls")
    return ChatResponse.final(content)


class RemoteChatProvider:
    """Chat completion over HTTP against any OpenAI-compatible endpoint."""

    def __init__(self, base_url: str, model: str, api_key: str | None = None,
                 timeout: float = 60.0, transport: httpx.BaseTransport | None = None):
        self.model = model
        headers = {}
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        self._client = httpx.Client(base_url=base_url, headers=headers,
                                    timeout=timeout, transport=transport)

    def chat_complete(self, req: ChatRequest) -> ChatResponse:
        if not req.messages:
            raise ValueError("chat request must carry at least one message")
        payload = build_chat_payload(req, self.model)
        try:
            resp = self._client.post("/chat/completions", json=payload)
            resp.raise_for_status()
            body = resp.json()
        except httpx.HTTPError as exc:
            raise ProviderFailure(f"chat completion request failed: {exc}") from exc
        return parse_chat_response(body)


class RemoteEmbedder:
    """Embeddings over HTTP (OpenAI-compatible /embeddings)."""

    def __init__(self, base_url: str, model: str, dimension: int,
                 api_key: str | None = None, timeout: float = 60.0,
                 transport: httpx.BaseTransport | None = None):
        self.model_id = model
        self.dimension = dimension
        headers = {}
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        self._client = httpx.Client(base_url=base_url, headers=headers,
                                    timeout=timeout, transport=transport)

    def embed_texts(self, texts: Sequence[str]) -> list[np.ndarray]:
        try:
            resp = self._client.post("/embeddings",
                                     json={"model": self.model_id, "input": list(texts)})
            resp.raise_for_status()
            body = resp.json()
            rows = sorted(body["data"], key=lambda r: r["index"])
            vectors = [np.asarray(r["embedding"], dtype=np.float32) for r in rows]
        except (httpx.HTTPError, KeyError, TypeError) as exc:
            raise ProviderFailure(f"embedding request failed: {exc}") from exc
        for v in vectors:
            if v.shape != (self.dimension,):
                raise ProviderFailure(
                    f"remote embedding dimension {v.shape} != configured {self.dimension}")
        return vectors


_JUDGE_PROMPTS = {
    "statement_supported": (
        "Does the context support the statement? Answer with exactly 'yes' or 'no'.\n"
        "Statement: {statement}\nContext: {context}"),
    "chunk_relevant": (
        "Is this passage relevant to the reference answer? Answer with exactly "
        "'yes' or 'no'.\nPassage: {chunk}\nReference answer: {ground_truth}"),
    "statement_decomposition": (
        "Split the text into its atomic statements. Return a JSON array of strings "
        "and nothing else.\nText: {text}"),
    "question_generation": (
        "Write {n} questions that the following answer would answer. Return a JSON "
        "array of strings and nothing else.\nAnswer: {answer}"),
}


class RemoteJudge:
    """LLM-as-judge over a remote chat provider. Prompts ask for yes/no or a
    JSON array; anything unparseable is a ProviderFailure."""

    def __init__(self, chat: ChatProvider):
        self._chat = chat

    def judge(self, task: str, inputs: dict[str, Any]) -> JudgeVerdict:
        if task not in _JUDGE_PROMPTS:
            raise ValueError(f"unknown judge task {task!r}")
        prompt = _JUDGE_PROMPTS[task].format(**inputs)
        resp = self._chat.chat_complete(ChatRequest(
            messages=[ConversationTurn(role="user", text=prompt)]))
        if resp.kind != "final_text":
            raise ProviderFailure("judge model returned tool calls instead of a verdict")
        text = (resp.text or "").strip()
        if task in ("statement_supported", "chunk_relevant"):
            verdict = text.lower().rstrip(".")
            if verdict not in ("yes", "no"):
                raise ProviderFailure(f"judge verdict not yes/no: {text!r}")
            return JudgeVerdict(task, verdict == "yes")
        try:
            items = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ProviderFailure(f"judge did not return a JSON array: {text!r}") from exc
        if not isinstance(items, list) or not all(isinstance(s, str) for s in items):
            raise ProviderFailure(f"judge did not return a JSON array of strings: {text!r}")
        return JudgeVerdict(task, items)
