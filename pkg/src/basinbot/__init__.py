"""basinbot: retrieval-augmented, tool-calling assistant engine for
basin-scale water-resource queries.

Pieces: a document ingest + embedding pipeline, an embedded cosine-similarity
index with metadata filtering, a tool-calling agent loop over document-search
and hydrology tools, a four-metric RAG evaluation harness, and an HTTP
gateway plus CLI tying them together.
"""

__version__ = "0.1.0"
