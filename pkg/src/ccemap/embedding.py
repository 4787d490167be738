"""Embedding vectors as data: file-backed stores and a remote fetch client.

The toolkit never runs a sentence model itself.  Vectors arrive either
from a precomputed vector file or from an HTTP embedding service, and
remote results are cached keyed by a content hash of each record's
canonical text, so editing a record invalidates its vector and reruns
are no-ops.
"""

from __future__ import annotations

import hashlib
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import requests

from .corpus import CceRecord
from .errors import EmbeddingError

DEFAULT_DIM = 768


@dataclass
class EmbeddingStore:
    """Fixed-dimension vectors keyed by id, tagged with a provider fingerprint."""

    dim: int
    fingerprint: str
    vectors: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise EmbeddingError(f"dim must be positive, got {self.dim}")

    def add(self, key: str, vector: np.ndarray) -> None:
        vec = np.asarray(vector, dtype=np.float64)
        if vec.shape != (self.dim,):
            raise EmbeddingError(
                f"vector for {key!r} has dim {vec.shape[0] if vec.ndim == 1 else vec.shape},"
                f" store dim is {self.dim}"
            )
        if not np.all(np.isfinite(vec)):
            raise EmbeddingError(f"vector for {key!r} has non-finite entries")
        if key in self.vectors:
            raise EmbeddingError(f"duplicate id {key!r}")
        self.vectors[key] = vec

    def __contains__(self, key: str) -> bool:
        return key in self.vectors

    def __len__(self) -> int:
        return len(self.vectors)

    def get(self, key: str) -> np.ndarray:
        try:
            return self.vectors[key]
        except KeyError:
            raise EmbeddingError(f"no vector for id {key!r}") from None

    def matrix(self, ids: Sequence[str]) -> np.ndarray:
        """Stack vectors for ids into an (n, dim) array; missing ids are fatal."""
        missing = self.missing(ids)
        if missing:
            raise EmbeddingError("missing vectors for ids: " + ", ".join(missing))
        if not ids:
            return np.empty((0, self.dim), dtype=np.float64)
        return np.stack([self.vectors[i] for i in ids])

    def missing(self, ids: Iterable[str]) -> list[str]:
        """Exhaustive, sorted report of ids without vectors."""
        return sorted(i for i in set(ids) if i not in self.vectors)

    def equals(self, other: "EmbeddingStore") -> bool:
        if (self.dim, self.fingerprint) != (other.dim, other.fingerprint):
            return False
        if set(self.vectors) != set(other.vectors):
            return False
        return all(np.array_equal(v, other.vectors[k]) for k, v in self.vectors.items())


def content_hash(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def merge_stores(stores: Sequence[EmbeddingStore]) -> EmbeddingStore:
    """Combine stores covering disjoint ids; dim and fingerprint must agree."""
    if not stores:
        raise EmbeddingError("no stores to merge")
    first = stores[0]
    merged = EmbeddingStore(dim=first.dim, fingerprint=first.fingerprint)
    for store in stores:
        if store.dim != first.dim:
            raise EmbeddingError(f"store dim mismatch: {store.dim} != {first.dim}")
        if store.fingerprint != first.fingerprint:
            raise EmbeddingError(
                "mixed provider fingerprints: "
                f"{store.fingerprint!r} != {first.fingerprint!r}"
            )
        for key, vec in store.vectors.items():
            merged.add(key, vec)
    return merged


def load_vector_file(path: str | Path, normalize: bool = False) -> EmbeddingStore:
    """Load a precomputed vector file.

    Format: first line ``<dim> <fingerprint>``, then one ``<id> <v0> <v1> ...``
    record per line.  Optionally L2-normalizes on load (off by default: it is
    unknown whether upstream embeddings were normalized).
    """
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise EmbeddingError(f"{path}: header must be '<dim> <fingerprint>'")
        try:
            dim = int(header[0])
        except ValueError:
            raise EmbeddingError(f"{path}: bad dim {header[0]!r}") from None
        store = EmbeddingStore(dim=dim, fingerprint=header[1])
        for n, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            parts = line.split()
            key, values = parts[0], parts[1:]
            if len(values) != dim:
                raise EmbeddingError(
                    f"{path}:{n}: id {key!r} has {len(values)} values, expected dim {dim}"
                )
            vec = np.array([float(v) for v in values], dtype=np.float64)
            if normalize:
                norm = float(np.linalg.norm(vec))
                if norm == 0.0:
                    raise EmbeddingError(f"{path}:{n}: cannot normalize zero vector {key!r}")
                vec = vec / norm
            store.add(key, vec)
    return store


def write_vector_file(store: EmbeddingStore, path: str | Path) -> None:
    """Write a store in the vector file format; floats use shortest round-trip form."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{store.dim} {store.fingerprint}\n")
        for key in sorted(store.vectors):
            values = " ".join(repr(float(x)) for x in store.vectors[key])
            fh.write(f"{key} {values}\n")


class EmbeddingClient:
    """HTTP client for the embedding service protocol.

    Request: POST ``{"texts": [...]}``; response: ``{"dim": d,
    "fingerprint": f, "vectors": [[...], ...]}`` with one vector per text.
    Transport failures are retried with bounded exponential backoff.
    """

    def __init__(
        self,
        endpoint: str,
        token: str | None = None,
        timeout: float = 30.0,
        max_retries: int = 4,
        backoff: float = 0.25,
        session: requests.Session | None = None,
    ) -> None:
        self.endpoint = endpoint
        self.token = token
        self.timeout = timeout
        self.max_retries = max_retries
        self.backoff = backoff
        self.session = session or requests.Session()
        self.request_count = 0

    def embed_batch(self, texts: list[str]) -> tuple[int, str, list[np.ndarray]]:
        headers = {}
        if self.token:
            headers["Authorization"] = f"Bearer {self.token}"
        last_error: Exception | None = None
        for attempt in range(self.max_retries + 1):
            if attempt:
                time.sleep(self.backoff * (2 ** (attempt - 1)))
            try:
                self.request_count += 1
                resp = self.session.post(
                    self.endpoint, json={"texts": texts}, headers=headers, timeout=self.timeout
                )
                resp.raise_for_status()
                body = resp.json()
                break
            except (requests.RequestException, ValueError) as exc:
                last_error = exc
        else:
            raise EmbeddingError(
                f"embedding service unreachable after {self.max_retries + 1} attempts: {last_error}"
            )
        vectors = body.get("vectors")
        if not isinstance(vectors, list) or len(vectors) != len(texts):
            raise EmbeddingError(
                f"service returned {len(vectors) if isinstance(vectors, list) else 'no'} vectors"
                f" for {len(texts)} texts"
            )
        dim = int(body.get("dim", len(vectors[0]) if vectors else 0))
        fingerprint = str(body.get("fingerprint", "unknown"))
        return dim, fingerprint, [np.asarray(v, dtype=np.float64) for v in vectors]


def fetch_remote(
    records: Sequence[CceRecord],
    client: EmbeddingClient,
    batch: int = 32,
    cache_path: str | Path | None = None,
    concurrency: int = 1,
) -> EmbeddingStore:
    """Fetch one vector per record, reusing the content-hash cache when present.

    The returned store is keyed by cce_id.  The cache file (vector file
    format, keyed by sha256 of canonical_text) is extended with every
    newly fetched vector, so an immediate rerun issues zero requests.
    """
    if batch < 1:
        raise EmbeddingError(f"batch must be positive, got {batch}")

    cache: EmbeddingStore | None = None
    if cache_path is not None and Path(cache_path).exists():
        cache = load_vector_file(cache_path)

    hashes = {r.cce_id: content_hash(r.canonical_text) for r in records}
    pending = [r for r in records if cache is None or hashes[r.cce_id] not in cache]

    dim: int | None = cache.dim if cache is not None else None
    fingerprint: str | None = cache.fingerprint if cache is not None else None
    fetched: dict[str, np.ndarray] = {}

    if pending:
        batches = [pending[i : i + batch] for i in range(0, len(pending), batch)]

        def run(chunk: list[CceRecord]) -> tuple[int, str, list[tuple[str, np.ndarray]]]:
            d, f, vecs = client.embed_batch([r.canonical_text for r in chunk])
            return d, f, list(zip([r.cce_id for r in chunk], vecs))

        if concurrency > 1:
            with ThreadPoolExecutor(max_workers=concurrency) as pool:
                results = list(pool.map(run, batches))
        else:
            results = [run(chunk) for chunk in batches]

        for d, f, pairs in results:
            if dim is None:
                dim, fingerprint = d, f
            elif d != dim:
                raise EmbeddingError(f"dim drift across batches: {d} != {dim}")
            elif f != fingerprint:
                raise EmbeddingError(
                    f"provider fingerprint drift across batches: {f!r} != {fingerprint!r}"
                )
            for cce_id, vec in pairs:
                if vec.shape != (dim,):
                    raise EmbeddingError(
                        f"service returned dim {vec.shape} for {cce_id}, expected {dim}"
                    )
                fetched[cce_id] = vec

    if dim is None or fingerprint is None:
        raise EmbeddingError("no vectors available: empty record list and no cache")

    store = EmbeddingStore(dim=dim, fingerprint=fingerprint)
    missing: list[str] = []
    for record in records:
        if record.cce_id in fetched:
            store.add(record.cce_id, fetched[record.cce_id])
        elif cache is not None and hashes[record.cce_id] in cache:
            store.add(record.cce_id, cache.get(hashes[record.cce_id]))
        else:
            missing.append(record.cce_id)
    if missing:
        raise EmbeddingError("embedding service returned no vectors for: " + ", ".join(sorted(missing)))

    if cache_path is not None and fetched:
        merged = EmbeddingStore(dim=dim, fingerprint=fingerprint)
        if cache is not None:
            for key, vec in cache.vectors.items():
                merged.add(key, vec)
        for cce_id, vec in fetched.items():
            h = hashes[cce_id]
            if h not in merged:
                merged.add(h, vec)
        write_vector_file(merged, cache_path)

    return store
