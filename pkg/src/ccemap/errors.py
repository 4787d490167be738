"""Exception hierarchy shared across the toolkit.

Every error the CLI reports in machine-readable form derives from
CcemapError; the ``code`` attribute becomes the ``type`` field of the
emitted error record.
"""


class CcemapError(Exception):
    """Base class for all toolkit errors."""

    code = "error"


class SchemaError(CcemapError):
    """Input does not match the declared schema (missing columns, bad header)."""

    code = "schema"


class CorpusError(CcemapError):
    """Corpus-level integrity failure (duplicate ids, unknown SR tokens)."""

    code = "corpus"


class EmbeddingError(CcemapError):
    """Vector file or embedding service failure."""

    code = "embedding"


class TransferError(CcemapError):
    """Label-transfer computation received invalid inputs."""

    code = "transfer"


class ReviewError(CcemapError):
    """Review session store rejected an operation."""

    code = "review"
