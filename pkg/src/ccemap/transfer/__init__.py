"""Distance-weighted transfer of requirement labels between corpora.

For target record i and source record j with embedding distance d_ij,
each source's binary requirement vector r_j contributes with weight
(1/(d_ij+eps))**p; the summed vector is rescaled by its maximum entry so
every component lands in [0, 1].  A top-K-with-threshold rule turns the
scores into proposed (record, requirement) pairs, and two diagnostics
drive parameter choice: the diversity index M(p), the mean over
requirements of the best score any target achieves, and the average
retained-list size L(p).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from ..corpus import Corpus, RequirementVector, SrId
from ..embedding import EmbeddingStore
from ..errors import TransferError
from ._backends import BACKEND, kernels

METRICS = ("euclidean", "cosine")

TRANSFER_KIND = "ccemap/transfer"
TRANSFER_VERSION = 1

# documented operating point: cosine metric, p=5.5, K=10, tau=0.68,
# chosen so the average retained list holds about five requirements
DEFAULT_METRIC = "cosine"
DEFAULT_P = 5.5
DEFAULT_TAU = 0.68
DEFAULT_K = 10
DEFAULT_EPSILON = 1e-9
DEFAULT_TARGET_M = 0.85
DEFAULT_TARGET_LIST_SIZE = 5.0


@dataclass(frozen=True)
class TransferConfig:
    metric: str = DEFAULT_METRIC
    p: float = DEFAULT_P
    tau: float = DEFAULT_TAU
    k: int = DEFAULT_K
    epsilon: float = DEFAULT_EPSILON

    def __post_init__(self) -> None:
        if self.metric not in METRICS:
            raise TransferError(f"metric must be one of {METRICS}, got {self.metric!r}")
        if not self.p > 0:
            raise TransferError(f"p must be positive, got {self.p}")
        if not 0.0 <= self.tau <= 1.0:
            raise TransferError(f"tau must be in [0, 1], got {self.tau}")
        if self.k < 1:
            raise TransferError(f"k must be >= 1, got {self.k}")
        if not self.epsilon > 0:
            raise TransferError(f"epsilon must be positive, got {self.epsilon}")

    def to_dict(self) -> dict:
        return {
            "metric": self.metric,
            "p": self.p,
            "tau": self.tau,
            "k": self.k,
            "epsilon": self.epsilon,
        }

    @classmethod
    def from_dict(cls, doc: Mapping) -> "TransferConfig":
        return cls(
            metric=doc.get("metric", DEFAULT_METRIC),
            p=float(doc.get("p", DEFAULT_P)),
            tau=float(doc.get("tau", DEFAULT_TAU)),
            k=int(doc.get("k", DEFAULT_K)),
            epsilon=float(doc.get("epsilon", DEFAULT_EPSILON)),
        )


@dataclass
class DistanceMatrix:
    """Pairwise target-by-source distances under one metric."""

    values: np.ndarray  # (T, S) float64
    target_ids: tuple[str, ...]
    source_ids: tuple[str, ...]
    metric: str


@dataclass
class RawScores:
    """Unnormalized per-target score vectors.

    ``values[i]`` holds the weighted label sums for target i, divided by
    exp(log_scale[i]); log_scale is zero unless the overflow guard
    factored out each row's maximum weight.  Either way the l-inf
    normalization is unaffected.
    """

    values: np.ndarray  # (T, R) float64
    log_scale: np.ndarray  # (T,)
    p: float
    epsilon: float
    target_ids: tuple[str, ...]
    catalog: tuple[SrId, ...]


@dataclass
class ScoreMatrix:
    """Normalized score vectors for every target, stacked row-wise."""

    values: np.ndarray  # (T, R), rows in [0, 1]
    zero: np.ndarray  # (T,) bool, true when the unnormalized row was all-zero
    p: float
    target_ids: tuple[str, ...]
    catalog: tuple[SrId, ...]

    def vector(self, target_id: str) -> "ScoreVector":
        i = self.target_ids.index(target_id)
        return ScoreVector(
            target_id=target_id,
            p=self.p,
            scores=self.values[i],
            zero=bool(self.zero[i]),
            catalog=self.catalog,
        )

    def __iter__(self) -> Iterable["ScoreVector"]:
        for i, target_id in enumerate(self.target_ids):
            yield ScoreVector(
                target_id=target_id,
                p=self.p,
                scores=self.values[i],
                zero=bool(self.zero[i]),
                catalog=self.catalog,
            )


@dataclass
class ScoreVector:
    target_id: str
    p: float
    scores: np.ndarray  # (R,) in [0, 1]
    zero: bool
    catalog: tuple[SrId, ...]


@dataclass(frozen=True)
class RetainedPair:
    sr: SrId
    score: float
    rank: int


@dataclass
class SelectionResult:
    target_id: str
    retained: list[RetainedPair]


def distance_matrix(
    store: EmbeddingStore,
    target_ids: Sequence[str],
    source_ids: Sequence[str],
    metric: str = DEFAULT_METRIC,
) -> DistanceMatrix:
    """Pairwise distances between target and source embeddings."""
    if metric not in METRICS:
        raise TransferError(f"metric must be one of {METRICS}, got {metric!r}")
    x = np.ascontiguousarray(store.matrix(target_ids), dtype=np.float64)
    y = np.ascontiguousarray(store.matrix(source_ids), dtype=np.float64)
    if metric == "cosine":
        bad = [
            ids[i]
            for mat, ids in ((x, list(target_ids)), (y, list(source_ids)))
            for i in np.flatnonzero(np.einsum("nd,nd->n", mat, mat) == 0.0)
        ]
        if bad:
            raise TransferError(
                "cosine distance undefined for zero-norm vectors: " + ", ".join(sorted(set(bad)))
            )
        values = kernels.cosine_distance(x, y)
    else:
        values = np.sqrt(kernels.sq_euclidean(x, y))
    return DistanceMatrix(
        values=values,
        target_ids=tuple(target_ids),
        source_ids=tuple(source_ids),
        metric=metric,
    )


def label_matrix(
    labels: Mapping[str, RequirementVector], source_ids: Sequence[str], catalog: Sequence[SrId]
) -> np.ndarray:
    """Stack per-source requirement vectors into an (S, R) float matrix."""
    r = len(catalog)
    out = np.zeros((len(source_ids), r), dtype=np.float64)
    for j, sid in enumerate(source_ids):
        try:
            vec = labels[sid]
        except KeyError:
            raise TransferError(f"no requirement vector for source id {sid!r}") from None
        if len(vec.bits) != r:
            raise TransferError(
                f"requirement vector for {sid!r} has length {len(vec.bits)}, catalog has {r}"
            )
        out[j] = vec.bits
    return out


def raw_scores(
    dist: DistanceMatrix,
    labels: Mapping[str, RequirementVector],
    p: float,
    epsilon: float,
    catalog: Sequence[SrId],
) -> RawScores:
    """Weighted label sums: score(i, r) = sum_j (1/(d_ij+eps))**p * r_j[r]."""
    if not p > 0:
        raise TransferError(f"p must be positive, got {p}")
    if not epsilon > 0:
        raise TransferError(f"epsilon must be positive, got {epsilon}")
    lmat = label_matrix(labels, dist.source_ids, catalog)
    weights, log_scale = kernels.powered_weights(dist.values, float(p), float(epsilon))
    values = weights @ lmat
    if not np.all(np.isfinite(values)):
        raise TransferError("non-finite raw scores; check distances and epsilon")
    return RawScores(
        values=values,
        log_scale=np.asarray(log_scale, dtype=np.float64),
        p=float(p),
        epsilon=float(epsilon),
        target_ids=dist.target_ids,
        catalog=tuple(catalog),
    )


def normalize(raw: RawScores) -> ScoreMatrix:
    """Rescale each row by its maximum entry; all-zero rows keep a zero flag.

    After rescaling, every non-zero row has maximum exactly 1.0.
    """
    values = raw.values
    if np.any(values < 0) or not np.all(np.isfinite(values)):
        raise TransferError("raw scores must be finite and non-negative")
    rowmax = values.max(axis=1) if values.shape[1] else np.zeros(values.shape[0])
    zero = rowmax == 0.0
    denom = np.where(zero, 1.0, rowmax)
    return ScoreMatrix(
        values=values / denom[:, None],
        zero=zero,
        p=raw.p,
        target_ids=raw.target_ids,
        catalog=raw.catalog,
    )


def select(scores: ScoreVector, tau: float, k: int) -> SelectionResult:
    """Retain requirements with score >= tau and rank <= k.

    Rank 1 is the highest score; ties break toward the lower catalog
    position.  Zero scores are never retained: a requirement no source
    ever exhibited is not a proposal, even at tau = 0.
    """
    if k < 1:
        raise TransferError(f"k must be >= 1, got {k}")
    order = sorted(range(len(scores.catalog)), key=lambda r: (-scores.scores[r], r))
    retained: list[RetainedPair] = []
    for rank, r in enumerate(order, start=1):
        if rank > k:
            break
        s = float(scores.scores[r])
        if s < tau or s <= 0.0:
            break
        retained.append(RetainedPair(sr=scores.catalog[r], score=s, rank=rank))
    return SelectionResult(target_id=scores.target_id, retained=retained)


def select_all(matrix: ScoreMatrix, tau: float, k: int) -> list[SelectionResult]:
    return [select(vec, tau, k) for vec in matrix]


def diversity_index(matrix: ScoreMatrix) -> float:
    """M(p): mean over requirements of the best score any target achieves."""
    if matrix.values.shape[0] == 0:
        raise TransferError("diversity index undefined for an empty target set")
    if matrix.values.shape[1] == 0:
        raise TransferError("diversity index undefined for an empty catalog")
    return float(matrix.values.max(axis=0).mean())


def avg_list_size(matrix: ScoreMatrix, tau: float, k: int) -> float:
    """L(p): mean number of retained requirements per target.

    Counting shortcut: the retained set is the top-ranked prefix of
    positive scores >= tau, so its length is min(k, #{r: s_r >= tau, s_r > 0}).
    """
    if matrix.values.shape[0] == 0:
        raise TransferError("average list size undefined for an empty target set")
    if k < 1:
        raise TransferError(f"k must be >= 1, got {k}")
    eligible = (matrix.values >= tau) & (matrix.values > 0.0)
    counts = np.minimum(eligible.sum(axis=1), k)
    return float(counts.mean())


def score_pipeline(
    store: EmbeddingStore,
    target_corpus: Corpus,
    source_corpus: Corpus,
    config: TransferConfig,
) -> tuple[DistanceMatrix, ScoreMatrix]:
    """Distance, weighting, and normalization for two corpora in one call."""
    if not source_corpus.labeled:
        raise TransferError("source corpus must be labeled")
    dist = distance_matrix(store, target_corpus.ids, source_corpus.ids, config.metric)
    raw = raw_scores(
        dist, source_corpus.labels(), config.p, config.epsilon, source_corpus.sr_catalog
    )
    return dist, normalize(raw)


@dataclass(frozen=True)
class SweepRow:
    p: float
    tau: float
    m: float
    l: float


@dataclass
class SweepResult:
    rows: list[SweepRow]
    k: int
    epsilon: float
    metric: str
    target_m: float
    target_list_size: float
    recommended_p: float | None
    recommended_tau: float | None


def sweep(
    dist: DistanceMatrix,
    labels: Mapping[str, RequirementVector],
    catalog: Sequence[SrId],
    p_grid: Sequence[float],
    tau_grid: Sequence[float],
    k: int = DEFAULT_K,
    epsilon: float = DEFAULT_EPSILON,
    target_m: float = DEFAULT_TARGET_M,
    target_list_size: float = DEFAULT_TARGET_LIST_SIZE,
) -> SweepResult:
    """Evaluate M(p) and L(p) over a parameter grid.

    Reports the smallest grid p whose diversity index reaches target_m,
    and the tau (at that p, or the largest grid p when none reaches it)
    whose average list size lands nearest target_list_size; ties prefer
    the larger tau.  Recommendations are reported, never auto-applied.
    """
    if not p_grid:
        raise TransferError("sweep requires a non-empty p grid")
    if not tau_grid:
        raise TransferError("sweep requires a non-empty tau grid")
    rows: list[SweepRow] = []
    m_by_p: dict[float, float] = {}
    l_by_p_tau: dict[tuple[float, float], float] = {}
    for p in p_grid:
        matrix = normalize(raw_scores(dist, labels, p, epsilon, catalog))
        m = diversity_index(matrix)
        m_by_p[p] = m
        for tau in tau_grid:
            l = avg_list_size(matrix, tau, k)
            l_by_p_tau[(p, tau)] = l
            rows.append(SweepRow(p=float(p), tau=float(tau), m=m, l=l))
    recommended_p = next((p for p in sorted(p_grid) if m_by_p[p] >= target_m), None)
    anchor_p = recommended_p if recommended_p is not None else max(p_grid)
    recommended_tau = min(
        tau_grid, key=lambda tau: (abs(l_by_p_tau[(anchor_p, tau)] - target_list_size), -tau)
    )
    return SweepResult(
        rows=rows,
        k=k,
        epsilon=epsilon,
        metric=dist.metric,
        target_m=target_m,
        target_list_size=target_list_size,
        recommended_p=recommended_p,
        recommended_tau=float(recommended_tau),
    )


def write_transfer(
    path: str | Path,
    matrix: ScoreMatrix,
    selections: Sequence[SelectionResult],
    config: TransferConfig,
    fingerprints: Mapping[str, str] | None = None,
    manifest: dict | None = None,
) -> None:
    """Write the transfer output file: header line, then one record per target."""
    by_target = {sel.target_id: sel for sel in selections}
    header: dict = {
        "kind": TRANSFER_KIND,
        "version": TRANSFER_VERSION,
        "config": config.to_dict(),
        "sr_catalog": [sr.render() for sr in matrix.catalog],
        "fingerprints": dict(fingerprints or {}),
        "manifest": manifest,
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(header, ensure_ascii=False, separators=(",", ":")) + "\n")
        for vec in matrix:
            sel = by_target.get(vec.target_id)
            doc = {
                "cce_id": vec.target_id,
                "zero": vec.zero,
                "scores": [float(s) for s in vec.scores],
                "retained": [
                    {"sr": pair.sr.render(), "score": pair.score, "rank": pair.rank}
                    for pair in (sel.retained if sel else [])
                ],
            }
            fh.write(json.dumps(doc, ensure_ascii=False, separators=(",", ":")) + "\n")


@dataclass
class TransferDocument:
    config: TransferConfig
    catalog: tuple[SrId, ...]
    fingerprints: dict[str, str]
    manifest: dict | None
    targets: list[dict]  # cce_id, zero, scores, retained


def read_transfer(path: str | Path) -> TransferDocument:
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise TransferError(f"{path}: empty transfer file")
    header = json.loads(lines[0])
    if header.get("kind") != TRANSFER_KIND:
        raise TransferError(f"{path}: not a transfer file (kind={header.get('kind')!r})")
    if header.get("version") != TRANSFER_VERSION:
        raise TransferError(f"{path}: unsupported transfer version {header.get('version')!r}")
    catalog = tuple(SrId.parse(t) for t in header["sr_catalog"])
    targets = [json.loads(line) for line in lines[1:] if line.strip()]
    seen: set[str] = set()
    for doc in targets:
        if doc["cce_id"] in seen:
            raise TransferError(f"{path}: duplicate target {doc['cce_id']}")
        seen.add(doc["cce_id"])
    return TransferDocument(
        config=TransferConfig.from_dict(header["config"]),
        catalog=catalog,
        fingerprints=dict(header.get("fingerprints", {})),
        manifest=header.get("manifest"),
        targets=targets,
    )


__all__ = [
    "BACKEND",
    "DEFAULT_EPSILON",
    "DEFAULT_K",
    "DEFAULT_METRIC",
    "DEFAULT_P",
    "DEFAULT_TAU",
    "DEFAULT_TARGET_LIST_SIZE",
    "DEFAULT_TARGET_M",
    "DistanceMatrix",
    "RawScores",
    "RetainedPair",
    "ScoreMatrix",
    "ScoreVector",
    "SelectionResult",
    "SweepResult",
    "SweepRow",
    "TransferConfig",
    "TransferDocument",
    "avg_list_size",
    "distance_matrix",
    "diversity_index",
    "label_matrix",
    "normalize",
    "raw_scores",
    "read_transfer",
    "score_pipeline",
    "select",
    "select_all",
    "sweep",
    "write_transfer",
]
