"""Naive reference implementations used as independent test oracles.

Everything here is scalar Python over plain lists: no numpy, no shared
code with the package under test.  Deliberately slow and obvious.
"""

from __future__ import annotations

import math


def euclidean(a: list[float], b: list[float]) -> float:
    total = 0.0
    for xa, xb in zip(a, b):
        total += (xa - xb) ** 2
    return math.sqrt(total)


def cosine(a: list[float], b: list[float]) -> float:
    dot = 0.0
    na = 0.0
    nb = 0.0
    for xa, xb in zip(a, b):
        dot += xa * xb
        na += xa * xa
        nb += xb * xb
    return 1.0 - dot / (math.sqrt(na) * math.sqrt(nb))


def distance_matrix(targets: list[list[float]], sources: list[list[float]], metric: str):
    fn = euclidean if metric == "euclidean" else cosine
    out = []
    for t in targets:
        row = [max(fn(t, s), 0.0) for s in sources]
        out.append(row)
    return out


def raw_scores(dist: list[list[float]], labels: list[list[int]], p: float, epsilon: float):
    n_req = len(labels[0]) if labels else 0
    out = []
    for row in dist:
        scores = [0.0] * n_req
        for j, d in enumerate(row):
            w = (1.0 / (d + epsilon)) ** p
            for r in range(n_req):
                if labels[j][r]:
                    scores[r] += w
        out.append(scores)
    return out


def normalize(vec: list[float]) -> tuple[list[float], bool]:
    top = max(vec) if vec else 0.0
    if top == 0.0:
        return list(vec), True
    return [v / top for v in vec], False


def pipeline(
    targets: list[list[float]],
    sources: list[list[float]],
    labels: list[list[int]],
    metric: str,
    p: float,
    epsilon: float,
):
    """Full naive transfer: distances, powered weights, l-inf rescale."""
    dist = distance_matrix(targets, sources, metric)
    raw = raw_scores(dist, labels, p, epsilon)
    scores = []
    zeros = []
    for vec in raw:
        normed, is_zero = normalize(vec)
        scores.append(normed)
        zeros.append(is_zero)
    return scores, zeros


def select_sorted(scores: list[float], tau: float, k: int):
    """Sort-then-filter selection oracle; returns (index, score, rank) triples."""
    order = sorted(range(len(scores)), key=lambda r: (-scores[r], r))
    retained = []
    for rank, r in enumerate(order, start=1):
        if rank > k or scores[r] < tau or scores[r] <= 0.0:
            continue
        retained.append((r, scores[r], rank))
    return retained


def diversity(scores: list[list[float]]) -> float:
    n_req = len(scores[0])
    total = 0.0
    for r in range(n_req):
        total += max(row[r] for row in scores)
    return total / n_req


def avg_list_size(scores: list[list[float]], tau: float, k: int) -> float:
    total = 0
    for row in scores:
        total += len(select_sorted(row, tau, k))
    return total / len(scores)


def cooccurrence(label_rows: list[list[int]], n_req: int):
    out = [[0] * n_req for _ in range(n_req)]
    for bits in label_rows:
        for a in range(n_req):
            if not bits[a]:
                continue
            for b in range(n_req):
                if bits[b]:
                    out[a][b] += 1
    return out
