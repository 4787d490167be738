"""Builders for review-session fixtures, including the marginal-count fixture.

The large fixture reproduces the headline validation counts: 3060
proposed relations, human labels 937 yes / 222 maybe / 1861 no / 40 na,
and a second source whose agreement with the human labels is ~0.956
overall with per-label rates ~{yes 0.941, maybe 0.734, no 0.989}.
Cell values are integers, so rates land within 0.001 of the targets.

The second source's column totals come out (953, 196, 1911): the yes
and maybe totals are exact, while 'no' absorbs the 3-relation slack
between the quoted totals (sum 3063) and the 3060 proposed relations.
"""

from __future__ import annotations

import csv
import io

from ccemap.review import ReviewSession
from ccemap.transfer import TransferDocument, TransferConfig

from conftest import make_catalog

# rows: human yes/maybe/no; cols: second-source yes/maybe/no
CONFUSION = {
    "yes": {"yes": 882, "maybe": 20, "no": 35},  # 937
    "maybe": {"yes": 38, "maybe": 163, "no": 21},  # 222
    "no": {"yes": 16, "maybe": 5, "no": 1840},  # 1861
}
NA_SECOND = {"yes": 17, "maybe": 8, "no": 15}  # 40 not-analyzable relations

EXPECTED_OVERALL = (882 + 163 + 1840) / 3020
EXPECTED_PER_LABEL = {"yes": 882 / 937, "maybe": 163 / 222, "no": 1840 / 1861}


def synthetic_transfer_doc(n_relations: int, per_target: int = 10) -> TransferDocument:
    """A transfer document with exactly n_relations retained pairs."""
    catalog = make_catalog(per_target + 2)
    targets = []
    remaining = n_relations
    t = 0
    while remaining > 0:
        take = min(per_target, remaining)
        cce_id = f"CCE-7{t:04d}-1"
        retained = [
            {"sr": catalog[r].render(), "score": round(1.0 - 0.03 * r, 4), "rank": r + 1}
            for r in range(take)
        ]
        targets.append({"cce_id": cce_id, "zero": False, "scores": [], "retained": retained})
        remaining -= take
        t += 1
    return TransferDocument(
        config=TransferConfig(),
        catalog=catalog,
        fingerprints={"provider": "fixture"},
        manifest=None,
        targets=targets,
    )


def label_stream(confusion=CONFUSION, na_second=NA_SECOND):
    """Yield (human_label, second_label) pairs cell by cell, na rows last."""
    for human in ("yes", "maybe", "no"):
        for second in ("yes", "maybe", "no"):
            for _ in range(confusion[human][second]):
                yield human, second
    for second in ("yes", "maybe", "no"):
        for _ in range(na_second[second]):
            yield "na", second


def build_marginal_session(directory) -> ReviewSession:
    """Session with the full 3060-relation fixture, labeled by both sources."""
    pairs = list(label_stream())
    doc = synthetic_transfer_doc(len(pairs))
    session = ReviewSession.create(directory, doc, name="marginals")
    relations = list(session.relations.values())
    assert len(relations) == len(pairs)

    second_rows = io.StringIO()
    writer = csv.writer(second_rows, lineterminator="\n")
    writer.writerow(["cce_id", "sr", "label"])
    for relation, (human, second) in zip(relations, pairs):
        session.apply_label(
            relation.cce_id,
            relation.sr,
            human,
            explanation="fixture assessment" if human != "na" else "",
            annotator="h1",
            at="2025-01-01T00:00:00Z",
        )
        writer.writerow([relation.cce_id, relation.sr.render(), second])
    second_rows.seek(0)
    report = session.import_second_source(second_rows, "second-model")
    assert report.imported == len(pairs)
    return session
