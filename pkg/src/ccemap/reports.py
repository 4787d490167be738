"""Report emitters for the analysis outputs.

All reports are plain delimited or JSON text with an embedded manifest
line, written deterministically so identical inputs produce identical
bytes.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Sequence

from .analysis import CooccurrenceMatrix, SrCluster, SrCounts, dominant_cluster
from .corpus import Corpus, SrId
from .manifest import dumps as manifest_dumps


def _write(path: str | Path, text: str) -> Path:
    path = Path(path)
    path.write_text(text, encoding="utf-8")
    return path


def _csv_buffer(manifest: dict | None) -> tuple[io.StringIO, "csv.writer"]:  # type: ignore[name-defined]
    buf = io.StringIO()
    if manifest is not None:
        buf.write("# manifest: " + manifest_dumps(manifest) + "\n")
    return buf, csv.writer(buf, lineterminator="\n")


def write_sr_counts(counts: SrCounts, path: str | Path, manifest: dict | None = None) -> Path:
    buf, writer = _csv_buffer(manifest)
    buf.write(f"# zero_label_records: {counts.zero_labels}\n")
    writer.writerow(["sr", "count"])
    for sr, count in zip(counts.catalog, counts.counts):
        writer.writerow([sr.render(), int(count)])
    return _write(path, buf.getvalue())


def write_cooccurrence(
    matrix: CooccurrenceMatrix, path: str | Path, manifest: dict | None = None
) -> Path:
    buf, writer = _csv_buffer(manifest)
    writer.writerow(["sr"] + [sr.render() for sr in matrix.catalog])
    for i, sr in enumerate(matrix.catalog):
        writer.writerow([sr.render()] + [int(v) for v in matrix.values[i]])
    return _write(path, buf.getvalue())


def write_clusters(
    clusters: Sequence[SrCluster], path: str | Path, manifest: dict | None = None
) -> Path:
    doc = {
        "manifest": manifest,
        "clusters": [
            {
                "id": c.cluster_id,
                "members": [sr.render() for sr in c.members],
                "keywords": [[term, weight] for term, weight in c.keywords],
                "representatives": list(c.representatives),
            }
            for c in clusters
        ],
    }
    return _write(path, json.dumps(doc, ensure_ascii=False, indent=1) + "\n")


def write_record_clusters(
    corpus: Corpus,
    clusters: Sequence[SrCluster],
    path: str | Path,
    manifest: dict | None = None,
) -> Path:
    """Dominant-cluster label per record; 'none' for zero-label records."""
    if corpus.label_sets is None:
        raise ValueError("record clusters require a labeled corpus")
    buf, writer = _csv_buffer(manifest)
    writer.writerow(["cce_id", "cluster"])
    for record in corpus.records:
        cid = dominant_cluster(sorted(corpus.label_sets.get(record.cce_id, frozenset())), clusters)
        writer.writerow([record.cce_id, "none" if cid is None else cid])
    return _write(path, buf.getvalue())


def write_term_frequency(
    rows: Sequence[tuple[str, int]], path: str | Path, manifest: dict | None = None
) -> Path:
    buf, writer = _csv_buffer(manifest)
    writer.writerow(["term", "count"])
    for term, count in rows:
        writer.writerow([term, count])
    return _write(path, buf.getvalue())


def write_sr_frequency(
    rows: Sequence[tuple[SrId, int, int]], path: str | Path, manifest: dict | None = None
) -> Path:
    buf, writer = _csv_buffer(manifest)
    writer.writerow(["sr", "all", "accepted"])
    for sr, total, accepted in rows:
        writer.writerow([sr.render(), total, accepted])
    return _write(path, buf.getvalue())


def write_sweep(result, path: str | Path, manifest: dict | None = None) -> Path:
    """Sweep table with the documented operating point echoed in the header."""
    buf, writer = _csv_buffer(manifest)
    defaults = {"metric": "cosine", "p": 5.5, "k": 10, "tau": 0.68, "target_list_size": 5}
    buf.write("# documented_defaults: " + json.dumps(defaults, separators=(",", ":")) + "\n")
    buf.write(
        "# targets: "
        + json.dumps(
            {"m": result.target_m, "list_size": result.target_list_size},
            separators=(",", ":"),
        )
        + "\n"
    )
    buf.write(
        "# recommended: "
        + json.dumps(
            {"p": result.recommended_p, "tau": result.recommended_tau},
            separators=(",", ":"),
        )
        + "\n"
    )
    writer.writerow(["p", "tau", "m", "l"])
    for row in result.rows:
        writer.writerow([repr(row.p), repr(row.tau), repr(row.m), repr(row.l)])
    return _write(path, buf.getvalue())


def write_agreement(report, path: str | Path, manifest: dict | None = None) -> Path:
    buf, writer = _csv_buffer(manifest)
    buf.write(f"# source: {report.source}\n")
    buf.write(f"# total: {report.total}\n")
    buf.write(f"# overall: {report.overall!r}\n")
    writer.writerow(["human\\second"] + list(report.labels))
    for label, row in zip(report.labels, report.matrix):
        writer.writerow([label] + [int(v) for v in row])
    writer.writerow([])
    writer.writerow(["label", "agreement"])
    for label in report.labels:
        value = report.per_label[label]
        writer.writerow([label, "" if value is None else repr(value)])
    writer.writerow([])
    writer.writerow(["sr", "disagreement_rate", "disagreements", "total"])
    for sr, rate, dis, total in report.per_sr:
        writer.writerow([sr.render(), repr(rate), dis, total])
    return _write(path, buf.getvalue())
