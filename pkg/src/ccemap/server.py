"""HTTP surface for the review workflow.

A versioned JSON API under /api/v1 plus static serving of the bundled
review UI.  All mutations funnel through the session store's single
writer; the API layer never touches relation state directly.
"""

from __future__ import annotations

import csv
import io
from importlib import resources
from pathlib import Path

from fastapi import Depends, FastAPI, HTTPException, Request
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .corpus import Corpus
from .errors import CcemapError, ReviewError
from .review import REVIEW_LABELS, MappingRelation, ReviewSession

API_PREFIX = "/api/v1"


def load_sr_themes() -> dict[str, str]:
    text = resources.files("ccemap.data").joinpath("sr_themes.csv").read_text("utf-8")
    reader = csv.reader(io.StringIO(text))
    next(reader)
    return {row[0]: row[1] for row in reader if row}


class LabelRequest(BaseModel):
    label: str
    explanation: str = ""
    annotator: str = ""


class ExportRequest(BaseModel):
    labels: list[str] = ["yes"]


def _relation_summary(rel: MappingRelation, themes: dict[str, str]) -> dict:
    sr = rel.sr.render()
    return {
        "cce_id": rel.cce_id,
        "sr": sr,
        "sr_theme": themes.get(sr, ""),
        "score": rel.score,
        "rank": rel.rank,
        "label": rel.label,
        "explanation": rel.explanation,
        "annotator": rel.annotator,
        "labeled_at": rel.labeled_at,
        "second_labels": dict(sorted(rel.second_labels.items())),
    }


def create_app(
    session: ReviewSession,
    corpus: Corpus | None = None,
    ui_dir: str | Path | None = None,
    token: str | None = None,
    export_dir: str | Path | None = None,
) -> FastAPI:
    app = FastAPI(title="ccemap review", version="1")
    themes = load_sr_themes()
    records = {r.cce_id: r for r in corpus.records} if corpus is not None else {}
    exports = Path(export_dir) if export_dir is not None else session.directory / "exports"

    async def check_token(request: Request) -> None:
        if token is None:
            return
        header = request.headers.get("authorization", "")
        if header != f"Bearer {token}":
            raise HTTPException(status_code=401, detail="missing or invalid token")

    guarded = Depends(check_token)

    @app.get(API_PREFIX + "/session", dependencies=[guarded])
    def get_session() -> dict:
        return {
            "name": session.meta["name"],
            "config": session.meta["config"],
            "sr_catalog": session.meta["sr_catalog"],
            "second_sources": session.second_sources(),
            "progress": session.progress(),
        }

    @app.get(API_PREFIX + "/progress", dependencies=[guarded])
    def get_progress() -> dict:
        return session.progress()

    @app.get(API_PREFIX + "/relations", dependencies=[guarded])
    def list_relations(
        label: str | None = None,
        sr: str | None = None,
        cce: str | None = None,
        offset: int = 0,
        limit: int = 50,
    ) -> dict:
        if label is not None and label not in REVIEW_LABELS:
            raise HTTPException(status_code=422, detail=f"unknown label filter {label!r}")
        rows = sorted(session.relations.values(), key=lambda r: (r.cce_id, r.rank, r.sr))
        if label is not None:
            rows = [r for r in rows if r.label == label]
        if sr is not None:
            rows = [r for r in rows if r.sr.render() == sr]
        if cce is not None:
            rows = [r for r in rows if cce in r.cce_id]
        window = rows[max(offset, 0) : max(offset, 0) + max(min(limit, 500), 0)]
        return {
            "total": len(rows),
            "offset": offset,
            "limit": limit,
            "items": [_relation_summary(r, themes) for r in window],
        }

    @app.get(API_PREFIX + "/relations/{cce_id}/{sr}", dependencies=[guarded])
    def get_relation(cce_id: str, sr: str) -> dict:
        try:
            rel = session.relations[(cce_id, sr)]
        except KeyError:
            raise HTTPException(status_code=404, detail=f"no relation ({cce_id}, {sr})")
        doc = _relation_summary(rel, themes)
        doc["history"] = [
            {"label": h.label, "explanation": h.explanation, "annotator": h.annotator, "at": h.at}
            for h in rel.history
        ]
        record = records.get(cce_id)
        doc["attributes"] = dict(record.attributes) if record is not None else None
        return doc

    @app.post(API_PREFIX + "/relations/{cce_id}/{sr}/label", dependencies=[guarded])
    def post_label(cce_id: str, sr: str, body: LabelRequest) -> dict:
        errors = []
        if body.label not in ("yes", "no", "maybe", "na"):
            errors.append({"field": "label", "message": "label must be yes, no, maybe, or na"})
        if body.label in ("yes", "no", "maybe") and not body.explanation.strip():
            errors.append(
                {"field": "explanation", "message": f"label {body.label!r} requires an explanation"}
            )
        if body.label in ("yes", "no", "maybe", "na") and not body.annotator:
            errors.append({"field": "annotator", "message": "annotator id is required"})
        if errors:
            raise HTTPException(status_code=422, detail=errors)
        try:
            rel = session.apply_label(
                cce_id, sr, body.label, explanation=body.explanation, annotator=body.annotator
            )
        except ReviewError as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        except OSError as exc:
            raise HTTPException(status_code=500, detail=f"store write failed: {exc}")
        doc = _relation_summary(rel, themes)
        doc["history"] = [
            {"label": h.label, "explanation": h.explanation, "annotator": h.annotator, "at": h.at}
            for h in rel.history
        ]
        return doc

    @app.get(API_PREFIX + "/agreement", dependencies=[guarded])
    def get_agreement(source: str | None = None, top: int = 10) -> dict:
        try:
            report = session.agreement(source=source, top_sr=top)
        except ReviewError as exc:
            return {"available": False, "reason": str(exc)}
        counts = session.label_counts()
        source_totals = {label: 0 for label in report.labels}
        for rel in session.relations.values():
            other = rel.second_labels.get(report.source)
            if other in source_totals:
                source_totals[other] += 1
        return {
            "available": True,
            "source": report.source,
            "labels": list(report.labels),
            "matrix": report.matrix,
            "total": report.total,
            "overall": report.overall,
            "per_label": report.per_label,
            # whole-session label distributions so the UI never sums locally
            "human_totals": {label: counts[label] for label in report.labels},
            "source_totals": source_totals,
            "per_sr": [
                {"sr": sr.render(), "rate": rate, "disagreements": dis, "total": total}
                for sr, rate, dis, total in report.per_sr
            ],
        }

    @app.post(API_PREFIX + "/export", dependencies=[guarded])
    def post_export(body: ExportRequest) -> dict:
        bad = [l for l in body.labels if l not in REVIEW_LABELS]
        if bad:
            raise HTTPException(status_code=422, detail=f"unknown labels {bad}")
        exports.mkdir(parents=True, exist_ok=True)
        name = "export-" + "-".join(sorted(set(body.labels))) + ".csv"
        path = exports / name
        try:
            rows = session.export_dataset(path, labels_filter=body.labels)
        except CcemapError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return {"path": str(path), "rows": rows}

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")
    else:
        bundled = resources.files("ccemap").joinpath("ui")
        if bundled.is_dir():
            app.mount("/", StaticFiles(directory=str(bundled), html=True), name="ui")

    return app
