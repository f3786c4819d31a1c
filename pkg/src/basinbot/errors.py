"""Exception types shared across the engine."""


class BasinbotError(Exception):
    """Base class for all engine errors."""

    code = "error"


# --- corpus ingest ---

class InvalidEncoding(BasinbotError):
    code = "invalid_encoding"


class EmptyDocument(BasinbotError):
    code = "empty_document"


# --- providers ---

class ProviderFailure(BasinbotError):
    """A model provider failed (network, remote error, bad payload)."""

    code = "provider_failure"


class ScriptExhausted(ProviderFailure):
    """The scripted chat provider was asked for more responses than it holds."""

    code = "script_exhausted"


# --- vector index ---

class DimensionMismatch(BasinbotError):
    code = "dimension_mismatch"


class ModelMismatch(BasinbotError):
    """Embedder identity differs from the one the index was built with."""

    code = "model_mismatch"


class IoFailure(BasinbotError):
    code = "io_failure"


class CorruptIndex(BasinbotError):
    """Index file failed checksum or structural validation."""

    code = "corrupt_index"


# --- hydrology datasets ---

class SchemaError(BasinbotError):
    """A CSV row does not match the documented schema. Carries the row number."""

    code = "schema_error"

    def __init__(self, message: str, row: int | None = None):
        super().__init__(message)
        self.row = row


class DanglingReference(BasinbotError):
    """Rows referencing unknown stations/sites. Carries the offending ids."""

    code = "dangling_reference"

    def __init__(self, message: str, offenders: list[str] | None = None):
        super().__init__(message)
        self.offenders = offenders or []


class UnknownRiver(BasinbotError):
    code = "unknown_river"


class UnknownStation(BasinbotError):
    code = "unknown_station"


class WrongKind(BasinbotError):
    code = "wrong_kind"


class NoData(BasinbotError):
    """No matching observations exist. Distinct from a value of zero."""

    code = "no_data"


# --- orchestrator ---

class DuplicateName(BasinbotError):
    code = "duplicate_name"


class UnknownSession(BasinbotError):
    code = "unknown_session"


class NothingToExport(BasinbotError):
    code = "nothing_to_export"


class NoTabularResult(BasinbotError):
    code = "no_tabular_result"
