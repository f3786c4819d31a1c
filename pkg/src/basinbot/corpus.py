"""Document ingest: parse -> chunk -> metadata -> embed.

Input is pre-extracted plain text or light markdown (PDF layout analysis,
OCR and table extraction are out of scope). Chunking is character-based
with a fixed overlap and an optional snap to paragraph boundaries, so the
whole pipeline is deterministic for a given config.
"""

from __future__ import annotations

import datetime as dt
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .errors import EmptyDocument, InvalidEncoding, ProviderFailure
from .providers import EmbeddingProvider

DOC_TYPES = ("policy_report", "hydrological_model", "eflow_assessment", "other")

DEFAULT_CHUNK_SIZE = 1000
DEFAULT_OVERLAP = 200
DEFAULT_MIN_TAIL = 200


@dataclass
class SourceDocument:
    doc_id: str
    title: str
    body: str
    doc_type: str = "other"
    date: dt.date | None = None
    tags: set[str] = field(default_factory=set)


@dataclass
class Chunk:
    chunk_id: str  # "{doc_id}#{ordinal}"
    doc_id: str
    ordinal: int
    text: str
    char_span: tuple[int, int]  # [start, end) into the document body
    metadata: dict[str, Any] = field(default_factory=dict)


@dataclass
class EmbeddedChunk:
    chunk: Chunk
    vector: np.ndarray  # float32, L2-normalized unless all-zero
    embed_model_id: str


def parse_document(raw: bytes, format_hint: str = "txt",
                   meta: dict[str, Any] | None = None) -> SourceDocument:
    """Decode and normalize a source file into a SourceDocument.

    Normalization: CRLF -> LF and trailing whitespace stripped per line.
    For markdown without an explicit title, the first '# ' heading is used.
    A non-ISO date value is kept as a tag rather than guessed at.
    """
    meta = dict(meta or {})
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise InvalidEncoding(f"document is not valid UTF-8: {exc}") from exc
    lines = [line.rstrip() for line in text.replace("\r\n", "\n").split("\n")]
    body = "\n".join(lines)
    if not body.strip():
        raise EmptyDocument("document body has no non-whitespace character")

    doc_id = meta.get("doc_id")
    if not doc_id:
        raise ValueError("meta must carry a doc_id")

    title = meta.get("title")
    if not title and format_hint == "md":
        for line in lines:
            if line.startswith("# "):
                title = line[2:].strip()
                break
    if not title:
        title = doc_id

    doc_type = meta.get("doc_type") or "other"
    if doc_type not in DOC_TYPES:
        raise ValueError(f"unknown doc_type {doc_type!r}")

    tags = set(meta.get("tags") or ())
    date = None
    raw_date = meta.get("date")
    if raw_date:
        try:
            date = dt.date.fromisoformat(str(raw_date))
        except ValueError:
            tags.add(str(raw_date))

    return SourceDocument(doc_id=doc_id, title=title, body=body,
                          doc_type=doc_type, date=date, tags=tags)


def generate_metadata(doc: SourceDocument, chunk_id: str,
                      char_span: tuple[int, int]) -> dict[str, Any]:
    """Metadata record carried by a chunk into the index: title, date,
    type, tags plus the chunk's identity."""
    return {
        "title": doc.title,
        "doc_type": doc.doc_type,
        "date": doc.date.isoformat() if doc.date is not None else None,
        "tags": sorted(doc.tags),
        "chunk_id": chunk_id,
        "char_span": [char_span[0], char_span[1]],
    }


def chunk_text(doc: SourceDocument, chunk_size: int = DEFAULT_CHUNK_SIZE,
               overlap: int = DEFAULT_OVERLAP,
               min_tail: int = DEFAULT_MIN_TAIL) -> list[Chunk]:
    """Cut the body into overlapping windows.

    Each next window starts ``overlap`` characters before the previous one
    ended, so consecutive spans overlap by exactly that amount. A non-final
    window's end snaps back to the nearest paragraph break ("\\n\\n") found in
    its last 20%, when that still lets the next window advance. A final
    window shorter than ``min_tail`` merges into the previous chunk.
    """
    if not (0 <= overlap < chunk_size):
        raise ValueError("need 0 <= overlap < chunk_size")
    if min_tail > chunk_size:
        raise ValueError("min_tail must not exceed chunk_size")

    body = doc.body
    spans: list[tuple[int, int]] = []
    start = 0
    snap_window = chunk_size // 5
    while True:
        end = min(start + chunk_size, len(body))
        if end < len(body):
            cut = body.rfind("\n\n", max(start, end - snap_window), end)
            if cut != -1:
                snapped = cut + 2  # keep the break with the earlier chunk
                if snapped - overlap > start:
                    end = snapped
        else:
            if spans and end - start < min_tail:
                spans[-1] = (spans[-1][0], end)
                break
        spans.append((start, end))
        if end >= len(body):
            break
        start = end - overlap

    chunks = []
    for ordinal, (s, e) in enumerate(spans):
        chunk_id = f"{doc.doc_id}#{ordinal}"
        chunks.append(Chunk(chunk_id=chunk_id, doc_id=doc.doc_id, ordinal=ordinal,
                            text=body[s:e], char_span=(s, e),
                            metadata=generate_metadata(doc, chunk_id, (s, e))))
    return chunks


def embed_corpus(chunks: Sequence[Chunk], embedder: EmbeddingProvider,
                 batch_size: int = 64) -> list[EmbeddedChunk]:
    """Embed chunks in input order, L2-normalizing every vector here so the
    index can score by dot product. Provider failures are re-raised with the
    index of the first chunk of the failing batch."""
    out: list[EmbeddedChunk] = []
    for lo in range(0, len(chunks), batch_size):
        batch = chunks[lo:lo + batch_size]
        try:
            vectors = embedder.embed_texts([c.text for c in batch])
        except ProviderFailure as exc:
            raise ProviderFailure(f"embedding failed at chunk index {lo}: {exc}") from exc
        for chunk, vec in zip(batch, vectors):
            v = np.asarray(vec, dtype=np.float64)
            norm = float(np.linalg.norm(v))
            if norm > 0.0:
                v = v / norm
            out.append(EmbeddedChunk(chunk=chunk, vector=v.astype(np.float32),
                                     embed_model_id=embedder.model_id))
    return out


# --------------------------------------------------------------------------
# corpus manifest + debug dump

def load_corpus_manifest(manifest_path: str | Path) -> list[SourceDocument]:
    """Read a manifest (JSON array of {path, doc_id, title?, doc_type?,
    date?, tags?}) and parse every referenced file. Paths are resolved
    relative to the manifest."""
    manifest_path = Path(manifest_path)
    with open(manifest_path, encoding="utf-8") as f:
        entries = json.load(f)
    docs = []
    for entry in entries:
        path = manifest_path.parent / entry["path"]
        fmt = "md" if path.suffix.lower() in (".md", ".markdown") else "txt"
        meta = {k: entry.get(k) for k in ("doc_id", "title", "doc_type", "date", "tags")}
        docs.append(parse_document(path.read_bytes(), fmt, meta))
    return docs


def ingest_corpus(docs: Sequence[SourceDocument], embedder: EmbeddingProvider,
                  chunk_size: int = DEFAULT_CHUNK_SIZE, overlap: int = DEFAULT_OVERLAP,
                  min_tail: int = DEFAULT_MIN_TAIL) -> list[EmbeddedChunk]:
    """Full pipeline over a document set."""
    chunks: list[Chunk] = []
    for doc in docs:
        chunks.extend(chunk_text(doc, chunk_size, overlap, min_tail))
    return embed_corpus(chunks, embedder)


def write_chunk_dump(embedded: Sequence[EmbeddedChunk], path: str | Path) -> None:
    """Debug dump: one EmbeddedChunk per JSON line, vector as a float array."""
    with open(path, "w", encoding="utf-8") as f:
        for ec in embedded:
            line = {
                "chunk_id": ec.chunk.chunk_id,
                "doc_id": ec.chunk.doc_id,
                "ordinal": ec.chunk.ordinal,
                "text": ec.chunk.text,
                "char_span": list(ec.chunk.char_span),
                "metadata": ec.chunk.metadata,
                "embed_model_id": ec.embed_model_id,
                "vector": [float(x) for x in ec.vector],
            }
            f.write(json.dumps(line, ensure_ascii=False) + "\n")
