import numpy as np
import pytest

from ccemap.corpus import Corpus, CceRecord, SrId
from ccemap.embedding import EmbeddingStore


def make_catalog(n: int) -> tuple[SrId, ...]:
    return tuple(SrId(1 + i // 15, 1 + i % 15) for i in range(n))


def random_instance(rng: np.random.Generator, max_side: int = 20, max_req: int = 8, max_dim: int = 6):
    """One random transfer problem: embeddings for targets/sources plus labels."""
    n_targets = int(rng.integers(1, max_side + 1))
    n_sources = int(rng.integers(1, max_side + 1))
    n_req = int(rng.integers(1, max_req + 1))
    dim = int(rng.integers(1, max_dim + 1))
    targets = rng.normal(size=(n_targets, dim))
    sources = rng.normal(size=(n_sources, dim))
    labels = (rng.random(size=(n_sources, n_req)) < 0.4).astype(int)
    return targets, sources, labels


def store_from_arrays(
    targets: np.ndarray, sources: np.ndarray, fingerprint: str = "test"
) -> tuple[EmbeddingStore, list[str], list[str]]:
    dim = targets.shape[1]
    store = EmbeddingStore(dim=dim, fingerprint=fingerprint)
    target_ids = [f"CCE-2{i:04d}-1" for i in range(len(targets))]
    source_ids = [f"CCE-1{j:04d}-1" for j in range(len(sources))]
    for key, vec in zip(target_ids, targets):
        store.add(key, vec)
    for key, vec in zip(source_ids, sources):
        store.add(key, vec)
    return store, target_ids, source_ids


def tiny_labeled_corpus() -> Corpus:
    """Three-record labeled corpus over catalog {SR 1.1, SR 5.2}."""
    catalog = (SrId(1, 1), SrId(5, 2))
    records = [
        CceRecord.make("CCE-10001-1", "source", {"desc": "password policy", "fix": "set policy"}),
        CceRecord.make("CCE-10002-1", "source", {"desc": "firewall zone", "fix": "enable zone"}),
        CceRecord.make("CCE-10003-1", "source", {"desc": "patch level", "fix": "apply updates"}),
    ]
    label_sets = {
        "CCE-10001-1": frozenset({SrId(1, 1)}),
        "CCE-10002-1": frozenset({SrId(5, 2)}),
        "CCE-10003-1": frozenset(),
    }
    return Corpus(
        product="source", records=records, sr_catalog=catalog, label_sets=label_sets
    )


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260810)
