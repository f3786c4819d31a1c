"""Document-search plugin: semantic search over the corpus index, exposed
as the registered tool ``search_documents``.

The tool returns structured snippets with verifiable source references; the
orchestrator and model decide how to phrase them. The query must be embedded
by the same provider the corpus was indexed with, so query and documents
share one vector space — a mismatch is an error, never a silent fallback.
"""

from __future__ import annotations

from typing import Any

from .errors import ModelMismatch
from .index import MetadataFilter, VectorIndex
from .providers import EmbeddingProvider
from .tools import ToolDescriptor, ToolParam

SEARCH_TOOL_NAME = "search_documents"


class DocPlugin:
    def __init__(self, index: VectorIndex, embedder: EmbeddingProvider,
                 default_k: int = 5):
        if embedder.model_id != index.embed_model_id:
            raise ModelMismatch(
                f"query embedder {embedder.model_id!r} differs from index "
                f"embedder {index.embed_model_id!r}")
        self.index = index
        self.embedder = embedder
        self.default_k = default_k

    def search(self, query: str, filter: MetadataFilter | None = None,
               k: int | None = None) -> dict[str, Any]:
        k = k or self.default_k
        query_vec = self.embedder.embed_texts([query])[0]
        hits = self.index.search(query_vec, filter=filter, k=k)
        snippets = [
            {
                "text": h.snippet,
                "score": h.score,
                "source": h.source.to_json(),
            }
            for h in hits
        ]
        result: dict[str, Any] = {
            "snippets": snippets,
            "source_refs": [h.source.to_json() for h in hits],
        }
        if not hits:
            result["message"] = "no matching documents"
        return result

    # tool-protocol surface -------------------------------------------------

    def descriptor(self) -> ToolDescriptor:
        return ToolDescriptor(
            name=SEARCH_TOOL_NAME,
            description=("Semantic search over the indexed document corpus. "
                         "Returns the most relevant text snippets with source "
                         "references. Optional metadata filters narrow the scope."),
            parameters=(
                ToolParam("query", "string", required=True,
                          description="The search query in natural language."),
                ToolParam("k", "integer",
                          description="Maximum number of snippets to return (default 5)."),
                ToolParam("filter", "object",
                          description=("Metadata filter: {doc_type_in: [..], "
                                       "date_range: [from, to], tags_any: [..], "
                                       "doc_id_in: [..]}.")),
            ),
        )

    def handle(self, arguments: dict[str, Any]) -> dict[str, Any]:
        try:
            flt = MetadataFilter.from_json(arguments.get("filter"))
        except ValueError as exc:
            return {"error": "bad_filter", "message": str(exc)}
        return self.search(arguments["query"], flt, arguments.get("k"))

    def register(self, registry) -> None:
        registry.register(self.descriptor(), self.handle)
