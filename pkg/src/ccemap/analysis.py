"""Corpus analytics: requirement frequencies, co-occurrence structure,
clustering with keywords, and term-frequency reports.

Everything here is deterministic by construction: fixed stop-word list,
explicit tie-breaking, no randomized algorithms.  Two runs on identical
input produce byte-identical reports.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from importlib import resources
from math import log
from typing import Iterable, Sequence

import numpy as np

from .corpus import CceRecord, Corpus, SrId
from .errors import CcemapError

DEFAULT_NUM_CLUSTERS = 4
UNREFERENCED_CLUSTER_ID = 0

_TOKEN_RE = re.compile(r"[a-z0-9]+")
_HAS_ALPHA_RE = re.compile(r"[a-z]")


def _load_stopwords() -> frozenset[str]:
    text = resources.files("ccemap.data").joinpath("stopwords_en.txt").read_text("utf-8")
    return frozenset(
        line.strip() for line in text.splitlines() if line.strip() and not line.startswith("#")
    )


STOPWORDS = _load_stopwords()


def tokenize(text: str) -> list[str]:
    """Lowercased alphanumeric tokens, stop words and bare numbers removed."""
    out = []
    for token in _TOKEN_RE.findall(text.lower()):
        if len(token) < 2 or token in STOPWORDS or not _HAS_ALPHA_RE.search(token):
            continue
        out.append(token)
    return out


def record_tokens(record: CceRecord) -> list[str]:
    """Tokens over a record's attribute values (column names excluded)."""
    return tokenize(" ".join(record.attributes.values()))


@dataclass
class SrCounts:
    catalog: tuple[SrId, ...]
    counts: np.ndarray  # (R,) int64
    zero_labels: int


def sr_counts(corpus: Corpus) -> SrCounts:
    """Per-SR record counts plus the number of records with no SR at all."""
    labels = corpus.labels()
    bits = np.array([labels[r.cce_id].bits for r in corpus.records], dtype=np.int64)
    if bits.size == 0:
        bits = bits.reshape(0, len(corpus.sr_catalog))
    counts = bits.sum(axis=0) if len(corpus.records) else np.zeros(len(corpus.sr_catalog), np.int64)
    return SrCounts(
        catalog=corpus.sr_catalog,
        counts=counts.astype(np.int64),
        zero_labels=corpus.zero_label_count(),
    )


@dataclass
class CooccurrenceMatrix:
    """Symmetric SR-by-SR record counts; the diagonal is the per-SR count."""

    catalog: tuple[SrId, ...]
    values: np.ndarray  # (R, R) int64


def cooccurrence(corpus: Corpus) -> CooccurrenceMatrix:
    """C[a][b] = number of records citing both a and b (outer-product sum)."""
    labels = corpus.labels()
    r = len(corpus.sr_catalog)
    bits = np.array([labels[rec.cce_id].bits for rec in corpus.records], dtype=np.int64)
    if bits.size == 0:
        values = np.zeros((r, r), dtype=np.int64)
    else:
        values = bits.T @ bits
    return CooccurrenceMatrix(catalog=corpus.sr_catalog, values=values)


@dataclass
class SrCluster:
    cluster_id: int
    members: tuple[SrId, ...]
    keywords: tuple[tuple[str, float], ...] = ()
    representatives: tuple[str, ...] = ()


def _cooccurrence_distance(c: np.ndarray) -> np.ndarray:
    """1 - C[a][b]/max(1, min(C[a][a], C[b][b])) for all SR pairs."""
    diag = np.diag(c).astype(np.float64)
    floor = np.maximum(1.0, np.minimum(diag[:, None], diag[None, :]))
    return 1.0 - c / floor


def cluster_srs(matrix: CooccurrenceMatrix, num_clusters: int) -> list[SrCluster]:
    """Partition the referenced SRs by average-linkage agglomeration.

    Distance is one minus the co-occurrence rate relative to the rarer
    SR of each pair.  Merge ties prefer the pair whose members come
    first in catalog order.  SRs never referenced by any record form the
    designated unreferenced cluster (id 0).
    """
    diag = np.diag(matrix.values)
    active = [i for i in range(len(matrix.catalog)) if diag[i] > 0]
    zero = [i for i in range(len(matrix.catalog)) if diag[i] == 0]
    if not 1 <= num_clusters <= len(active):
        raise CcemapError(
            f"num_clusters must be in [1, {len(active)}] (referenced SRs), got {num_clusters}"
        )

    dist = _cooccurrence_distance(matrix.values.astype(np.float64))
    clusters: list[list[int]] = [[i] for i in active]
    # average linkage between current clusters, kept incrementally
    d: dict[tuple[int, int], float] = {}
    for a in range(len(clusters)):
        for b in range(a + 1, len(clusters)):
            d[(a, b)] = float(dist[clusters[a][0], clusters[b][0]])

    alive = set(range(len(clusters)))
    while len(alive) > num_clusters:
        best: tuple[float, tuple[int, ...], tuple[int, ...], int, int] | None = None
        for a in sorted(alive):
            for b in sorted(alive):
                if a >= b:
                    continue
                key = (
                    d[(a, b)],
                    tuple(sorted(clusters[a])),
                    tuple(sorted(clusters[b])),
                    a,
                    b,
                )
                if best is None or key < best:
                    best = key
        assert best is not None
        _, _, _, a, b = best
        na, nb = len(clusters[a]), len(clusters[b])
        for c in alive:
            if c in (a, b):
                continue
            da = d[tuple(sorted((a, c)))]  # type: ignore[index]
            db = d[tuple(sorted((b, c)))]  # type: ignore[index]
            d[tuple(sorted((a, c)))] = (na * da + nb * db) / (na + nb)  # type: ignore[index]
        clusters[a] = sorted(clusters[a] + clusters[b])
        alive.remove(b)

    groups = sorted(
        (sorted(clusters[a]) for a in alive),
        key=lambda members: (-len(members), members[0]),
    )
    out = [
        SrCluster(
            cluster_id=cid,
            members=tuple(matrix.catalog[i] for i in members),
        )
        for cid, members in enumerate(groups, start=1)
    ]
    if zero:
        out.append(
            SrCluster(
                cluster_id=UNREFERENCED_CLUSTER_ID,
                members=tuple(matrix.catalog[i] for i in zero),
            )
        )
    return out


def cluster_keywords(
    cluster: SrCluster, corpus: Corpus, n: int = 10
) -> list[tuple[str, float]]:
    """Top-n terms for a cluster by tf (within cluster records) x idf (corpus).

    A record belongs to the cluster when its label set intersects the
    cluster members.  Terms present in every corpus record weigh zero
    and are dropped; order is weight descending, then lexicographic.
    """
    if corpus.label_sets is None:
        raise CcemapError("cluster keywords require a labeled corpus")
    members = set(cluster.members)
    total = len(corpus.records)
    doc_freq: Counter[str] = Counter()
    cluster_tf: Counter[str] = Counter()
    for record in corpus.records:
        tokens = record_tokens(record)
        doc_freq.update(set(tokens))
        if members & corpus.label_sets.get(record.cce_id, frozenset()):
            cluster_tf.update(tokens)
    weighted = []
    for term, tf in cluster_tf.items():
        idf = log(total / doc_freq[term])
        weight = tf * idf
        if weight > 0.0:
            weighted.append((term, weight))
    weighted.sort(key=lambda item: (-item[1], item[0]))
    return weighted[:n]


def representative_records(cluster: SrCluster, corpus: Corpus, n: int = 3) -> list[str]:
    """Record ids most covered by the cluster's SRs (overlap desc, then id)."""
    if corpus.label_sets is None:
        raise CcemapError("representatives require a labeled corpus")
    members = set(cluster.members)
    scored = []
    for record in corpus.records:
        overlap = len(members & corpus.label_sets.get(record.cce_id, frozenset()))
        if overlap:
            scored.append((-overlap, record.cce_id))
    scored.sort()
    return [cce_id for _, cce_id in scored[:n]]


def describe_clusters(
    clusters: Sequence[SrCluster], corpus: Corpus, n_terms: int = 10, n_reps: int = 3
) -> list[SrCluster]:
    """Fill keyword lists and representative records for every cluster."""
    out = []
    for cluster in clusters:
        out.append(
            SrCluster(
                cluster_id=cluster.cluster_id,
                members=cluster.members,
                keywords=tuple(cluster_keywords(cluster, corpus, n_terms)),
                representatives=tuple(representative_records(cluster, corpus, n_reps)),
            )
        )
    return out


def dominant_cluster(srs: Iterable[SrId], clusters: Sequence[SrCluster]) -> int | None:
    """Cluster id holding the plurality of the given SRs; ties take the
    lower id; None when the record has no SRs."""
    membership = {sr: c.cluster_id for c in clusters for sr in c.members}
    votes: Counter[int] = Counter()
    for sr in srs:
        if sr in membership:
            votes[membership[sr]] += 1
    if not votes:
        return None
    return min(votes, key=lambda cid: (-votes[cid], cid))


def block_order(matrix: CooccurrenceMatrix, num_clusters: int | None = None) -> list[int]:
    """Permutation of catalog indices grouping SRs by cluster.

    Clusters are ordered by size descending (ties by first member);
    members stay in catalog order; unreferenced SRs go last.  Applying
    the permutation to rows and columns yields the sorted matrix.
    """
    diag = np.diag(matrix.values)
    referenced = int((diag > 0).sum())
    if referenced == 0:
        return list(range(len(matrix.catalog)))
    if num_clusters is None:
        num_clusters = min(DEFAULT_NUM_CLUSTERS, referenced)
    clusters = cluster_srs(matrix, num_clusters)
    index = {sr: i for i, sr in enumerate(matrix.catalog)}
    perm: list[int] = []
    for cluster in clusters:
        if cluster.cluster_id == UNREFERENCED_CLUSTER_ID:
            continue
        perm.extend(sorted(index[sr] for sr in cluster.members))
    perm.extend(i for i in range(len(matrix.catalog)) if diag[i] == 0)
    return perm


def apply_block_order(matrix: CooccurrenceMatrix, perm: Sequence[int]) -> CooccurrenceMatrix:
    idx = np.asarray(perm, dtype=np.intp)
    return CooccurrenceMatrix(
        catalog=tuple(matrix.catalog[i] for i in perm),
        values=matrix.values[np.ix_(idx, idx)],
    )


def term_frequency_report(records: Sequence[CceRecord], n: int = 50) -> list[tuple[str, int]]:
    """Top-n tokens by frequency across record texts (word-cloud data)."""
    counts: Counter[str] = Counter()
    for record in records:
        counts.update(record_tokens(record))
    ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    return ranked[:n]


def sr_frequency_report(
    relations: Iterable[tuple[SrId, str]], accepted_label: str = "yes"
) -> list[tuple[SrId, int, int]]:
    """(SR, total proposals, accepted proposals) sorted by total descending."""
    totals: Counter[SrId] = Counter()
    accepted: Counter[SrId] = Counter()
    for sr, label in relations:
        totals[sr] += 1
        if label == accepted_label:
            accepted[sr] += 1
    return sorted(
        ((sr, totals[sr], accepted[sr]) for sr in totals),
        key=lambda row: (-row[1], row[0]),
    )
