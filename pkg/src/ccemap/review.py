"""Human review of proposed relations: an event-sourced session store.

Every mutation appends one event line to the session's log; the
in-memory state is a pure fold over the log, so the full audit trail
survives and a crash can lose at most the final partial line.  Reads
see consistent snapshots; all writes funnel through one lock.
"""

from __future__ import annotations

import csv
import io
import json
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable

from .corpus import SrId
from .errors import ReviewError
from .manifest import dumps as manifest_dumps
from .manifest import now_iso, text_sha256
from .transfer import TransferDocument, read_transfer

REVIEW_LABELS = ("yes", "no", "maybe", "na", "pending")
AGREEMENT_LABELS = ("yes", "maybe", "no")
SESSION_KIND = "ccemap/session"
SESSION_VERSION = 1
EXPORT_HEADER = ["cce_id", "sr", "score", "rank", "label", "explanation", "annotator", "labeled_at"]


@dataclass
class LabelEntry:
    label: str
    explanation: str
    annotator: str
    at: str


@dataclass
class MappingRelation:
    """One proposed (target CCE, SR) pair under review."""

    cce_id: str
    sr: SrId
    score: float
    rank: int
    label: str = "pending"
    explanation: str = ""
    annotator: str = ""
    labeled_at: str = ""
    history: list[LabelEntry] = field(default_factory=list)
    second_labels: dict[str, str] = field(default_factory=dict)

    @property
    def key(self) -> tuple[str, str]:
        return (self.cce_id, self.sr.render())


@dataclass
class ImportReport:
    source: str
    imported: int
    unmatched: list[tuple[str, str]]


@dataclass
class AgreementReport:
    """Human-vs-second-source agreement over yes/maybe/no relations."""

    source: str
    labels: tuple[str, ...]
    matrix: list[list[int]]  # rows: human, cols: second source
    total: int
    overall: float
    per_label: dict[str, float | None]
    per_sr: list[tuple[SrId, float, int, int]]  # (sr, rate, disagreements, total)


def _validate_label(label: str, explanation: str, annotator: str) -> None:
    if label not in REVIEW_LABELS:
        raise ReviewError(f"unknown label {label!r}; expected one of {REVIEW_LABELS}")
    if label == "pending":
        raise ReviewError("relations start pending; apply yes/no/maybe/na instead")
    if not annotator:
        raise ReviewError("a non-pending label requires an annotator id")
    if label in ("yes", "no", "maybe") and not explanation.strip():
        raise ReviewError(f"label {label!r} requires a non-empty explanation")


class ReviewSession:
    """Single-writer session store over an append-only event log."""

    def __init__(self, directory: Path, meta: dict):
        self.directory = directory
        self.meta = meta
        self.relations: dict[tuple[str, str], MappingRelation] = {}
        self.unmapped: list[str] = []
        self._lock = threading.Lock()
        self._log: IO[str] | None = None

    # -- construction -------------------------------------------------

    @classmethod
    def create(
        cls,
        directory: str | Path,
        transfer: TransferDocument | str | Path,
        name: str | None = None,
        resume: bool = False,
        manifest: dict | None = None,
    ) -> "ReviewSession":
        """Seed a session from a transfer output: one pending relation per
        retained pair; targets with no proposals join the unmapped tally."""
        directory = Path(directory)
        meta_path = directory / "session.json"
        if meta_path.exists():
            if not resume:
                raise ReviewError(
                    f"session already exists at {directory}; pass resume to reopen"
                )
            return cls.open(directory)
        if isinstance(transfer, (str, Path)):
            transfer_fp = "sha256:" + text_sha256(Path(transfer).read_text("utf-8"))
            transfer = read_transfer(transfer)
        else:
            transfer_fp = ""
        directory.mkdir(parents=True, exist_ok=True)
        config = transfer.config.to_dict()
        meta = {
            "kind": SESSION_KIND,
            "version": SESSION_VERSION,
            "name": name or directory.name,
            "created_at": now_iso(),
            "transfer_fingerprint": transfer_fp,
            "config": config,
            "config_fingerprint": "sha256:" + text_sha256(manifest_dumps(config)),
            "fingerprints": transfer.fingerprints,
            "sr_catalog": [sr.render() for sr in transfer.catalog],
            "manifest": manifest,
        }
        session = cls(directory, meta)
        meta_path.write_text(manifest_dumps(meta) + "\n", encoding="utf-8")
        session._open_log()
        with session._lock:
            for target in transfer.targets:
                retained = target.get("retained", [])
                if not retained:
                    session._append({"event": "unmapped", "cce_id": target["cce_id"]})
                    session._fold_unmapped(target["cce_id"])
                    continue
                for pair in retained:
                    event = {
                        "event": "proposed",
                        "cce_id": target["cce_id"],
                        "sr": pair["sr"],
                        "score": pair["score"],
                        "rank": pair["rank"],
                    }
                    session._append(event)
                    session._fold_proposed(event)
        return session

    @classmethod
    def open(cls, directory: str | Path) -> "ReviewSession":
        directory = Path(directory)
        meta_path = directory / "session.json"
        if not meta_path.exists():
            raise ReviewError(f"no session at {directory}")
        meta = json.loads(meta_path.read_text("utf-8"))
        if meta.get("kind") != SESSION_KIND:
            raise ReviewError(f"{meta_path}: not a session file")
        session = cls(directory, meta)
        log_path = directory / "events.jsonl"
        if log_path.exists():
            lines = log_path.read_text("utf-8").splitlines()
            for n, line in enumerate(lines):
                if not line.strip():
                    continue
                try:
                    event = json.loads(line)
                except json.JSONDecodeError:
                    if n == len(lines) - 1:
                        break  # torn final write; everything before it is intact
                    raise ReviewError(f"{log_path}:{n + 1}: corrupt event line")
                session._fold(event)
        session._open_log()
        return session

    def _open_log(self) -> None:
        self._log = open(self.directory / "events.jsonl", "a", encoding="utf-8", newline="\n")

    def close(self) -> None:
        if self._log is not None:
            self._log.close()
            self._log = None

    def __enter__(self) -> "ReviewSession":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    # -- event fold ---------------------------------------------------

    def _append(self, event: dict) -> None:
        assert self._log is not None
        self._log.write(json.dumps(event, ensure_ascii=False, separators=(",", ":")) + "\n")
        self._log.flush()

    def _fold(self, event: dict) -> None:
        kind = event.get("event")
        if kind == "proposed":
            self._fold_proposed(event)
        elif kind == "unmapped":
            self._fold_unmapped(event["cce_id"])
        elif kind == "labeled":
            relation = self._get(event["cce_id"], event["sr"])
            self._fold_labeled(relation, event)
        elif kind == "second":
            relation = self._get(event["cce_id"], event["sr"])
            relation.second_labels[event["source"]] = event["label"]
        else:
            raise ReviewError(f"unknown event type {kind!r}")

    def _fold_proposed(self, event: dict) -> None:
        key = (event["cce_id"], event["sr"])
        if key in self.relations:
            raise ReviewError(f"duplicate relation {key}")
        self.relations[key] = MappingRelation(
            cce_id=event["cce_id"],
            sr=SrId.parse(event["sr"]),
            score=float(event["score"]),
            rank=int(event["rank"]),
        )

    def _fold_unmapped(self, cce_id: str) -> None:
        self.unmapped.append(cce_id)

    def _fold_labeled(self, relation: MappingRelation, event: dict) -> None:
        entry = LabelEntry(
            label=event["label"],
            explanation=event.get("explanation", ""),
            annotator=event.get("annotator", ""),
            at=event.get("at", ""),
        )
        relation.history.append(entry)
        relation.label = entry.label
        relation.explanation = entry.explanation
        relation.annotator = entry.annotator
        relation.labeled_at = entry.at

    def _get(self, cce_id: str, sr: str) -> MappingRelation:
        try:
            return self.relations[(cce_id, sr)]
        except KeyError:
            raise ReviewError(f"unknown relation ({cce_id}, {sr})") from None

    # -- mutations ----------------------------------------------------

    def apply_label(
        self,
        cce_id: str,
        sr: str | SrId,
        label: str,
        explanation: str = "",
        annotator: str = "",
        at: str | None = None,
    ) -> MappingRelation:
        """Label one relation; appends to history, idempotent on identical input."""
        sr_token = sr.render() if isinstance(sr, SrId) else SrId.parse(sr).render()
        _validate_label(label, explanation, annotator)
        with self._lock:
            relation = self._get(cce_id, sr_token)
            if (
                relation.label == label
                and relation.explanation == explanation
                and relation.annotator == annotator
            ):
                return relation
            event = {
                "event": "labeled",
                "cce_id": cce_id,
                "sr": sr_token,
                "label": label,
                "explanation": explanation,
                "annotator": annotator,
                "at": at if at is not None else now_iso(),
            }
            self._append(event)
            self._fold_labeled(relation, event)
            return relation

    def import_second_source(
        self, source: str | Path | IO[str], source_name: str
    ) -> ImportReport:
        """Attach a second label source from (cce_id, sr, label) records.

        Labels outside yes/no/maybe are fatal with their line number;
        entries that match no relation are reported, not applied.
        """
        if not source_name:
            raise ReviewError("second source needs a name")
        if isinstance(source, (str, Path)):
            with open(source, "r", encoding="utf-8", newline="") as fh:
                return self.import_second_source(fh, source_name)
        reader = csv.reader(source)
        try:
            header = next(reader)
        except StopIteration:
            raise ReviewError("empty import file") from None
        required = ["cce_id", "sr", "label"]
        if [h.strip() for h in header[:3]] != required:
            raise ReviewError(f"import header must start with {required}, got {header}")
        rows: list[tuple[int, str, str, str]] = []
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) < 3:
                raise ReviewError(f"line {line_no}: expected 3 columns, got {len(row)}")
            cce_id, sr_token, label = row[0].strip(), row[1].strip(), row[2].strip()
            if label not in AGREEMENT_LABELS:
                raise ReviewError(
                    f"line {line_no}: label must be one of {AGREEMENT_LABELS}, got {label!r}"
                )
            rows.append((line_no, cce_id, SrId.parse(sr_token).render(), label))
        imported = 0
        unmatched: list[tuple[str, str]] = []
        with self._lock:
            for _, cce_id, sr_token, label in rows:
                if (cce_id, sr_token) not in self.relations:
                    unmatched.append((cce_id, sr_token))
                    continue
                event = {
                    "event": "second",
                    "source": source_name,
                    "cce_id": cce_id,
                    "sr": sr_token,
                    "label": label,
                }
                self._append(event)
                self.relations[(cce_id, sr_token)].second_labels[source_name] = label
                imported += 1
        return ImportReport(source=source_name, imported=imported, unmatched=unmatched)

    # -- queries ------------------------------------------------------

    def second_sources(self) -> list[str]:
        names = {name for rel in self.relations.values() for name in rel.second_labels}
        return sorted(names)

    def agreement(self, source: str | None = None, top_sr: int | None = None) -> AgreementReport:
        """Confusion matrix and agreement rates against one second source.

        Only relations with a human yes/maybe/no label and a label from
        the source count; na and pending are excluded.
        """
        sources = self.second_sources()
        if source is None:
            if len(sources) != 1:
                raise ReviewError(
                    f"specify the second source; session has {sources or 'none'}"
                )
            source = sources[0]
        idx = {label: i for i, label in enumerate(AGREEMENT_LABELS)}
        matrix = [[0, 0, 0] for _ in AGREEMENT_LABELS]
        per_sr_total: dict[SrId, int] = {}
        per_sr_dis: dict[SrId, int] = {}
        for relation in self.relations.values():
            if relation.label not in idx:
                continue
            other = relation.second_labels.get(source)
            if other is None:
                continue
            matrix[idx[relation.label]][idx[other]] += 1
            per_sr_total[relation.sr] = per_sr_total.get(relation.sr, 0) + 1
            if other != relation.label:
                per_sr_dis[relation.sr] = per_sr_dis.get(relation.sr, 0) + 1
        total = sum(sum(row) for row in matrix)
        if total == 0:
            raise ReviewError(f"no relations labeled by both human and {source!r}")
        diagonal = sum(matrix[i][i] for i in range(len(AGREEMENT_LABELS)))
        per_label: dict[str, float | None] = {}
        for label, i in idx.items():
            row_total = sum(matrix[i])
            per_label[label] = (matrix[i][i] / row_total) if row_total else None
        per_sr = sorted(
            (
                (sr, per_sr_dis.get(sr, 0) / per_sr_total[sr], per_sr_dis.get(sr, 0), per_sr_total[sr])
                for sr in per_sr_total
            ),
            key=lambda row: (-row[1], row[0]),
        )
        if top_sr is not None:
            per_sr = per_sr[:top_sr]
        return AgreementReport(
            source=source,
            labels=AGREEMENT_LABELS,
            matrix=matrix,
            total=total,
            overall=diagonal / total,
            per_label=per_label,
            per_sr=per_sr,
        )

    def label_counts(self) -> dict[str, int]:
        counts = {label: 0 for label in REVIEW_LABELS}
        for relation in self.relations.values():
            counts[relation.label] += 1
        return counts

    def progress(self) -> dict:
        counts = self.label_counts()
        analyzable = counts["yes"] + counts["no"] + counts["maybe"]
        return {
            "total": len(self.relations),
            "labeled": len(self.relations) - counts["pending"],
            "by_label": counts,
            "analyzable": analyzable,
            "unmapped_targets": len(self.unmapped),
            "acceptance_ratio": round(counts["yes"] / analyzable, 4) if analyzable else None,
        }

    def ordered_relations(self) -> list[MappingRelation]:
        return sorted(self.relations.values(), key=lambda rel: (rel.cce_id, rel.sr))

    # -- snapshot and export -------------------------------------------

    def write_snapshot(self) -> Path:
        path = self.directory / "snapshot.json"
        doc = {
            "meta": self.meta,
            "progress": self.progress(),
            "unmapped": sorted(self.unmapped),
            "relations": [
                {
                    "cce_id": rel.cce_id,
                    "sr": rel.sr.render(),
                    "score": rel.score,
                    "rank": rel.rank,
                    "label": rel.label,
                    "explanation": rel.explanation,
                    "annotator": rel.annotator,
                    "labeled_at": rel.labeled_at,
                    "second_labels": dict(sorted(rel.second_labels.items())),
                    "history_length": len(rel.history),
                }
                for rel in self.ordered_relations()
            ],
        }
        tmp = path.with_suffix(".json.tmp")
        tmp.write_text(json.dumps(doc, ensure_ascii=False, indent=1) + "\n", encoding="utf-8")
        tmp.replace(path)
        return path

    def export_dataset(
        self,
        path: str | Path,
        labels_filter: Iterable[str] = ("yes",),
        manifest: dict | None = None,
    ) -> int:
        """Write the final mapping file; returns the number of data rows.

        Rows are relations whose current label is in the filter, sorted
        by (cce_id, sr).  The summary block reports whole-session label
        counts and the acceptance ratio over analyzable relations.
        """
        wanted = set(labels_filter)
        unknown = wanted - set(REVIEW_LABELS)
        if unknown:
            raise ReviewError(f"unknown labels in filter: {sorted(unknown)}")
        counts = self.label_counts()
        analyzable = counts["yes"] + counts["no"] + counts["maybe"]
        ratio = round(counts["yes"] / analyzable, 4) if analyzable else None
        rows = [rel for rel in self.ordered_relations() if rel.label in wanted]
        buf = io.StringIO()
        buf.write("# ccemap export v1\n")
        if manifest is not None:
            buf.write("# manifest: " + manifest_dumps(manifest) + "\n")
        buf.write(f"# session: {self.meta['name']}\n")
        buf.write(f"# config_fingerprint: {self.meta['config_fingerprint']}\n")
        buf.write("# filter: " + ",".join(sorted(wanted)) + "\n")
        buf.write("# counts: " + json.dumps(counts, separators=(",", ":")) + "\n")
        buf.write(f"# analyzable: {analyzable}\n")
        buf.write(f"# acceptance_ratio: {'' if ratio is None else format(ratio, '.4f')}\n")
        buf.write("# unmapped: " + json.dumps(sorted(self.unmapped), separators=(",", ":")) + "\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(EXPORT_HEADER)
        for rel in rows:
            writer.writerow(
                [
                    rel.cce_id,
                    rel.sr.render(),
                    repr(rel.score),
                    rel.rank,
                    rel.label,
                    rel.explanation,
                    rel.annotator,
                    rel.labeled_at,
                ]
            )
        Path(path).write_text(buf.getvalue(), encoding="utf-8")
        return len(rows)


def read_export(path: str | Path) -> tuple[dict, list[dict]]:
    """Parse an export file back into (meta, rows)."""
    meta: dict = {}
    data_lines: list[str] = []
    for line in Path(path).read_text("utf-8").splitlines():
        if line.startswith("# "):
            body = line[2:]
            if ": " in body:
                key, value = body.split(": ", 1)
                meta[key] = value
            else:
                meta.setdefault("banner", body)
        else:
            data_lines.append(line)
    reader = csv.reader(data_lines)
    header = next(reader)
    if header != EXPORT_HEADER:
        raise ReviewError(f"unexpected export header: {header}")
    rows = []
    for row in reader:
        if not row:
            continue
        rows.append(
            {
                "cce_id": row[0],
                "sr": row[1],
                "score": float(row[2]),
                "rank": int(row[3]),
                "label": row[4],
                "explanation": row[5],
                "annotator": row[6],
                "labeled_at": row[7],
            }
        )
    return meta, rows


def session_from_export(
    directory: str | Path,
    export_path: str | Path,
    config: dict,
    name: str | None = None,
) -> ReviewSession:
    """Rebuild a session from a full export (used for round-trip checks)."""
    meta, rows = read_export(export_path)
    directory = Path(directory)
    if (directory / "session.json").exists():
        raise ReviewError(f"session already exists at {directory}")
    directory.mkdir(parents=True, exist_ok=True)
    session_meta = {
        "kind": SESSION_KIND,
        "version": SESSION_VERSION,
        "name": name or meta.get("session", directory.name),
        "created_at": now_iso(),
        "transfer_fingerprint": "",
        "config": config,
        "config_fingerprint": meta.get(
            "config_fingerprint", "sha256:" + text_sha256(manifest_dumps(config))
        ),
        "fingerprints": {},
        "sr_catalog": sorted({row["sr"] for row in rows}),
        "manifest": None,
    }
    session = ReviewSession(directory, session_meta)
    (directory / "session.json").write_text(manifest_dumps(session_meta) + "\n", encoding="utf-8")
    session._open_log()
    with session._lock:
        for cce_id in json.loads(meta.get("unmapped", "[]")):
            session._append({"event": "unmapped", "cce_id": cce_id})
            session._fold_unmapped(cce_id)
        for row in rows:
            event = {
                "event": "proposed",
                "cce_id": row["cce_id"],
                "sr": row["sr"],
                "score": row["score"],
                "rank": row["rank"],
            }
            session._append(event)
            session._fold_proposed(event)
    for row in rows:
        if row["label"] != "pending":
            session.apply_label(
                row["cce_id"],
                row["sr"],
                row["label"],
                explanation=row["explanation"],
                annotator=row["annotator"],
                at=row["labeled_at"],
            )
    return session
