"""Embedded cosine-similarity index with metadata filtering and a
single-file on-disk format.

Search is exact (no approximate NN): scores are float64 dot products over
the stored float32 vectors, sorted by score descending with chunk_id as the
tie-break, so results are fully deterministic. Readers may share an index;
writes must not interleave with reads or saves.
"""

from __future__ import annotations

import datetime as dt
import json
import struct
import threading
import zlib
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from .corpus import Chunk, EmbeddedChunk
from .errors import CorruptIndex, DimensionMismatch, IoFailure, ModelMismatch
from .messages import SourceRef

MAGIC = b"BVI1"


@dataclass
class MetadataFilter:
    """Conjunctive filter over chunk metadata; absent fields match everything."""

    doc_type_in: set[str] | None = None
    date_from: dt.date | None = None
    date_to: dt.date | None = None
    tags_any: set[str] | None = None
    doc_id_in: set[str] | None = None

    def __post_init__(self):
        if self.date_from is not None and self.date_to is not None \
                and self.date_from > self.date_to:
            raise ValueError("date_from must be <= date_to")

    def matches(self, chunk: Chunk) -> bool:
        meta = chunk.metadata
        if self.doc_type_in is not None and meta.get("doc_type") not in self.doc_type_in:
            return False
        if self.date_from is not None or self.date_to is not None:
            raw = meta.get("date")
            if not raw:
                return False
            date = dt.date.fromisoformat(raw)
            if self.date_from is not None and date < self.date_from:
                return False
            if self.date_to is not None and date > self.date_to:
                return False
        if self.tags_any is not None and not (set(meta.get("tags") or ()) & self.tags_any):
            return False
        if self.doc_id_in is not None and chunk.doc_id not in self.doc_id_in:
            return False
        return True

    @staticmethod
    def from_json(obj: dict[str, Any] | None) -> "MetadataFilter":
        obj = obj or {}
        rng = obj.get("date_range") or [None, None]
        return MetadataFilter(
            doc_type_in=set(obj["doc_type_in"]) if obj.get("doc_type_in") else None,
            date_from=dt.date.fromisoformat(rng[0]) if rng[0] else None,
            date_to=dt.date.fromisoformat(rng[1]) if rng[1] else None,
            tags_any=set(obj["tags_any"]) if obj.get("tags_any") else None,
            doc_id_in=set(obj["doc_id_in"]) if obj.get("doc_id_in") else None,
        )


@dataclass
class SearchHit:
    chunk_id: str
    score: float
    snippet: str
    source: SourceRef


class VectorIndex:
    """chunk_id -> EmbeddedChunk map plus the score matrix derived from it."""

    def __init__(self, dimension: int, embed_model_id: str):
        self.dimension = dimension
        self.embed_model_id = embed_model_id
        self._entries: dict[str, EmbeddedChunk] = {}
        self._write_lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._entries)

    def entries(self) -> Iterable[EmbeddedChunk]:
        return self._entries.values()

    def upsert(self, items: Sequence[EmbeddedChunk]) -> int:
        """Insert or replace entries (last write per chunk_id wins)."""
        for item in items:
            if item.vector.shape != (self.dimension,):
                raise DimensionMismatch(
                    f"vector for {item.chunk.chunk_id} has length {item.vector.shape[0]}, "
                    f"index dimension is {self.dimension}")
            if item.embed_model_id != self.embed_model_id:
                raise ModelMismatch(
                    f"entry embedded with {item.embed_model_id!r}, "
                    f"index uses {self.embed_model_id!r}")
        with self._write_lock:
            for item in items:
                self._entries[item.chunk.chunk_id] = item
        return len(items)

    def search(self, query_vec: np.ndarray, filter: MetadataFilter | None = None,
               k: int = 5) -> list[SearchHit]:
        """Exact filtered top-k by cosine similarity.

        The query is normalized here; stored vectors are normalized at embed
        time, so cosine reduces to a dot product. An all-zero query (or an
        all-zero stored vector) scores 0 against everything, which makes the
        result the first k filtered chunk_ids in ascending order.
        """
        query_vec = np.asarray(query_vec, dtype=np.float64)
        if query_vec.shape != (self.dimension,):
            raise DimensionMismatch(
                f"query has length {query_vec.shape}, index dimension is {self.dimension}")
        if k <= 0:
            raise ValueError("k must be positive")
        qnorm = float(np.linalg.norm(query_vec))
        if qnorm > 0.0:
            query_vec = query_vec / qnorm

        flt = filter or MetadataFilter()
        candidates = [e for e in self._entries.values() if flt.matches(e.chunk)]
        if not candidates:
            return []
        # rows renormalize in float64: float32 storage leaves norms ~1e-7 off 1,
        # and self-similarity must come out at exactly 1 within float64 noise
        matrix = np.stack([e.vector for e in candidates]).astype(np.float64)
        norms = np.linalg.norm(matrix, axis=1)
        norms[norms == 0.0] = 1.0
        scores = (matrix / norms[:, None]) @ query_vec

        order = sorted(range(len(candidates)),
                       key=lambda i: (-scores[i], candidates[i].chunk.chunk_id))
        hits = []
        for i in order[:k]:
            chunk = candidates[i].chunk
            hits.append(SearchHit(
                chunk_id=chunk.chunk_id,
                score=float(scores[i]),
                snippet=chunk.text,
                source=SourceRef.document(chunk.doc_id, chunk.metadata.get("title") or "",
                                          chunk.char_span),
            ))
        return hits

    # ----------------------------------------------------------------------
    # persistence: MAGIC | u32 meta_len | meta JSON | f32-LE vectors | u32 CRC32

    def save(self, path: str | Path) -> None:
        entries = sorted(self._entries.values(), key=lambda e: e.chunk.chunk_id)
        meta = {
            "format_version": 1,
            "dimension": self.dimension,
            "embed_model_id": self.embed_model_id,
            "count": len(entries),
            "entries": [
                {
                    "chunk_id": e.chunk.chunk_id,
                    "doc_id": e.chunk.doc_id,
                    "ordinal": e.chunk.ordinal,
                    "text": e.chunk.text,
                    "char_span": list(e.chunk.char_span),
                    "metadata": e.chunk.metadata,
                }
                for e in entries
            ],
        }
        meta_bytes = json.dumps(meta, ensure_ascii=False).encode("utf-8")
        vec_bytes = b"".join(
            e.vector.astype("<f4").tobytes() for e in entries)
        blob = MAGIC + struct.pack("<I", len(meta_bytes)) + meta_bytes + vec_bytes
        blob += struct.pack("<I", zlib.crc32(blob) & 0xFFFFFFFF)
        try:
            Path(path).write_bytes(blob)
        except OSError as exc:
            raise IoFailure(f"cannot write index to {path}: {exc}") from exc

    @staticmethod
    def load(path: str | Path) -> "VectorIndex":
        try:
            blob = Path(path).read_bytes()
        except OSError as exc:
            raise IoFailure(f"cannot read index from {path}: {exc}") from exc
        if len(blob) < len(MAGIC) + 8 or blob[:len(MAGIC)] != MAGIC:
            raise CorruptIndex("not an index file (bad magic or truncated)")
        stored_crc = struct.unpack("<I", blob[-4:])[0]
        if zlib.crc32(blob[:-4]) & 0xFFFFFFFF != stored_crc:
            raise CorruptIndex("checksum mismatch")
        meta_len = struct.unpack("<I", blob[4:8])[0]
        meta_end = 8 + meta_len
        try:
            meta = json.loads(blob[8:meta_end].decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise CorruptIndex(f"metadata block unreadable: {exc}") from exc
        if meta.get("format_version") != 1:
            raise CorruptIndex(f"unsupported format version {meta.get('format_version')}")
        dim, count = meta["dimension"], meta["count"]
        expected = meta_end + count * dim * 4 + 4
        if len(blob) != expected:
            raise CorruptIndex(f"file length {len(blob)} != expected {expected}")
        vectors = np.frombuffer(blob[meta_end:-4], dtype="<f4").reshape(count, dim)

        index = VectorIndex(dimension=dim, embed_model_id=meta["embed_model_id"])
        items = []
        for row, entry in zip(vectors, meta["entries"]):
            chunk = Chunk(chunk_id=entry["chunk_id"], doc_id=entry["doc_id"],
                          ordinal=entry["ordinal"], text=entry["text"],
                          char_span=(entry["char_span"][0], entry["char_span"][1]),
                          metadata=entry["metadata"])
            items.append(EmbeddedChunk(chunk=chunk, vector=row.copy(),
                                       embed_model_id=meta["embed_model_id"]))
        index.upsert(items)
        return index

    def stats(self) -> dict[str, Any]:
        return {"entries": len(self), "dimension": self.dimension,
                "embed_model_id": self.embed_model_id}
