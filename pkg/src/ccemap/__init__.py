"""ccemap: map CCE configuration corpora onto IEC 62443-3-3 requirements.

The toolkit ingests labeled and unlabeled CCE tables, attaches text
embeddings through pluggable providers, transfers requirement labels
across corpora with inverse-distance-power weighting, computes corpus
analytics, and hosts a human review workflow that produces the final
vetted mapping dataset.
"""

__version__ = "0.1.0"

from .errors import (
    CcemapError,
    CorpusError,
    EmbeddingError,
    ReviewError,
    SchemaError,
    TransferError,
)

__all__ = [
    "__version__",
    "CcemapError",
    "CorpusError",
    "EmbeddingError",
    "ReviewError",
    "SchemaError",
    "TransferError",
]
