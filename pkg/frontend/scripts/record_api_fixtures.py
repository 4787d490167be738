#!/usr/bin/env python3
"""Record real API responses for the frontend contract tests.

Builds the shipped fixture session through the backend library, drives
the live FastAPI app, and dumps selected responses under
frontend/tests/fixtures/.  Rerun after API changes:

    python3 frontend/scripts/record_api_fixtures.py
"""

from __future__ import annotations

import json
import os
import sys
import tempfile
from pathlib import Path

os.environ.setdefault("SOURCE_DATE_EPOCH", "0")

REPO = Path(__file__).resolve().parents[2]
sys.path.insert(0, str(REPO / "tests"))

from fastapi.testclient import TestClient

from ccemap.server import create_app
from pipeline_steps import FIXTURES
from test_server import fixture_session

OUT = REPO / "frontend" / "tests" / "fixtures"


def dump(name: str, payload) -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    (OUT / name).write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n", "utf-8")
    print(f"recorded {name}")


def main() -> int:
    with tempfile.TemporaryDirectory() as tmp:
        session, target = fixture_session(Path(tmp))
        app = create_app(session, corpus=target)
        with TestClient(app) as tc:
            dump("session.json", tc.get("/api/v1/session").json())
            dump("relations_pending.json", tc.get("/api/v1/relations").json())
            dump(
                "relation_detail.json",
                tc.get("/api/v1/relations/CCE-10003-9/SR 5.2").json(),
            )
            dump("progress_fresh.json", tc.get("/api/v1/progress").json())
            dump("agreement_unavailable.json", tc.get("/api/v1/agreement").json())

            reject = tc.post(
                "/api/v1/relations/CCE-10004-7/SR 1.5/label",
                json={"label": "yes", "explanation": "", "annotator": "a1"},
            )
            dump(
                "label_reject.json",
                {"status": reject.status_code, "body": reject.json()},
            )
            accept = tc.post(
                "/api/v1/relations/CCE-10004-7/SR 1.5/label",
                json={
                    "label": "yes",
                    "explanation": "Minimum password length is password robustness",
                    "annotator": "a1",
                },
            )
            dump(
                "label_accept.json",
                {"status": accept.status_code, "body": accept.json()},
            )

            # apply the shipped human labels and the second source, then
            # record the dashboard payloads for the labeled state
            import csv

            with open(FIXTURES / "human_labels.csv", newline="", encoding="utf-8") as fh:
                for row in csv.DictReader(fh):
                    session.apply_label(
                        row["cce_id"], row["sr"], row["label"],
                        explanation=row["explanation"], annotator=row["annotator"],
                        at="1970-01-01T00:00:00Z",
                    )
            session.import_second_source(FIXTURES / "second_source.csv", "model-b")
            dump("progress_labeled.json", tc.get("/api/v1/progress").json())
            dump("agreement.json", tc.get("/api/v1/agreement").json())
            dump(
                "relations_maybe.json",
                tc.get("/api/v1/relations", params={"label": "maybe"}).json(),
            )
        session.close()

        # the large marginal-count session: dashboard distribution fixture
        from review_fixture import build_marginal_session

        marg = build_marginal_session(Path(tmp) / "marginals")
        app = create_app(marg)
        with TestClient(app) as tc:
            dump("agreement_marginals.json", tc.get("/api/v1/agreement").json())
        marg.close()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
