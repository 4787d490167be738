"""CCE corpus ingestion, canonicalization, and requirement labels.

CCE tables are not a normalized database: every product ships its own
column set around a CCE-ID column.  A declared schema names the id
column, the optional requirement column, and which columns become
record attributes.  Each record is canonicalized into a deterministic
structured-text form that downstream embedding providers consume.
"""

from __future__ import annotations

import csv
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Sequence

from .errors import CorpusError, SchemaError

CCE_ID_RE = re.compile(r"^CCE-\d+-\d$")
_SR_TOKEN_RE = re.compile(r"^[Ss][Rr]\s*(\d+)\.(\d+)$")

PRODUCTS = ("source", "target")

CORPUS_KIND = "ccemap/corpus"
CORPUS_VERSION = 1


@dataclass(frozen=True, order=True)
class SrId:
    """One IEC 62443-3-3 system security requirement, e.g. SR 5.2."""

    family: int
    index: int

    def __post_init__(self) -> None:
        if self.family < 1 or self.index < 1:
            raise CorpusError(f"invalid SR id: family={self.family} index={self.index}")

    @classmethod
    def parse(cls, token: str) -> "SrId":
        m = _SR_TOKEN_RE.match(token.strip())
        if not m:
            raise CorpusError(f"unknown SR token: {token!r}")
        return cls(int(m.group(1)), int(m.group(2)))

    def render(self) -> str:
        return f"SR {self.family}.{self.index}"

    def __str__(self) -> str:  # pragma: no cover - convenience
        return self.render()


@dataclass(frozen=True)
class RequirementVector:
    """Binary membership vector over an SR catalog."""

    bits: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(b not in (0, 1) for b in self.bits):
            raise CorpusError("requirement vector entries must be 0 or 1")

    @classmethod
    def from_srs(cls, srs: Iterable[SrId], catalog: Sequence[SrId]) -> "RequirementVector":
        positions = {sr: i for i, sr in enumerate(catalog)}
        bits = [0] * len(catalog)
        for sr in srs:
            try:
                bits[positions[sr]] = 1
            except KeyError:
                raise CorpusError(f"SR {sr.render()} not in catalog") from None
        return cls(tuple(bits))

    @property
    def is_zero(self) -> bool:
        return not any(self.bits)


def canonicalize_attributes(attributes: dict[str, str]) -> str:
    """Deterministic structured-text rendering of an attribute map.

    Keys sorted lexicographically, no insignificant whitespace, UTF-8
    characters left unescaped.  Byte-for-byte stable across runs and
    insertion orders.
    """
    if not attributes:
        raise CorpusError("attributes must be non-empty")
    return json.dumps(attributes, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


@dataclass(frozen=True)
class CceRecord:
    cce_id: str
    product: str
    attributes: dict[str, str]
    canonical_text: str

    @classmethod
    def make(cls, cce_id: str, product: str, attributes: dict[str, str]) -> "CceRecord":
        if not CCE_ID_RE.match(cce_id):
            raise CorpusError(f"malformed CCE id: {cce_id!r}")
        if product not in PRODUCTS:
            raise CorpusError(f"unknown product tag: {product!r}")
        attrs = dict(attributes)
        return cls(cce_id, product, attrs, canonicalize_attributes(attrs))


def canonicalize(record: CceRecord) -> str:
    """Canonical text of a record; pure function of its attributes."""
    return canonicalize_attributes(record.attributes)


@dataclass(frozen=True)
class RowReject:
    """A row that could not become a record; reported, never silently dropped."""

    row_number: int
    cce_value: str
    reason: str


@dataclass(frozen=True)
class CorpusSchema:
    """Column-role declaration for one CCE table."""

    id_column: str
    sr_column: str | None = None
    sr_delimiter: str = ";"
    attribute_columns: tuple[str, ...] | None = None
    delimiter: str = ","


@dataclass
class Corpus:
    """A parsed CCE corpus; labeled when an SR column was declared."""

    product: str
    records: list[CceRecord]
    sr_catalog: tuple[SrId, ...] = ()
    label_sets: dict[str, frozenset[SrId]] | None = None
    rejects: list[RowReject] = field(default_factory=list)

    @property
    def labeled(self) -> bool:
        return self.label_sets is not None

    @property
    def ids(self) -> list[str]:
        return [r.cce_id for r in self.records]

    def labels(self) -> dict[str, RequirementVector]:
        """One RequirementVector per record; all-zero when no SRs are associated."""
        if self.label_sets is None:
            raise CorpusError("corpus is unlabeled")
        return {
            r.cce_id: RequirementVector.from_srs(
                self.label_sets.get(r.cce_id, frozenset()), self.sr_catalog
            )
            for r in self.records
        }

    def zero_label_count(self) -> int:
        if self.label_sets is None:
            raise CorpusError("corpus is unlabeled")
        return sum(1 for r in self.records if not self.label_sets.get(r.cce_id))

    def with_catalog(self, catalog: Sequence[SrId]) -> "Corpus":
        """Rebind labels to a (usually merged) catalog."""
        if self.label_sets is not None:
            known = set(catalog)
            for cce_id, srs in self.label_sets.items():
                missing = sorted(srs - known)
                if missing:
                    raise CorpusError(
                        f"{cce_id}: SRs not in catalog: "
                        + ", ".join(sr.render() for sr in missing)
                    )
        return Corpus(
            product=self.product,
            records=self.records,
            sr_catalog=tuple(catalog),
            label_sets=self.label_sets,
            rejects=self.rejects,
        )


def parse_corpus(
    stream: IO[str] | str | Path,
    schema: CorpusSchema,
    product: str = "source",
) -> Corpus:
    """Parse a delimited CCE table (header row required) into a Corpus.

    Rows whose CCE id does not match the id pattern are collected in
    ``rejects``.  Duplicate ids and unknown SR tokens are fatal.
    """
    if isinstance(stream, (str, Path)):
        with open(stream, "r", encoding="utf-8", newline="") as fh:
            return parse_corpus(fh, schema, product)

    reader = csv.reader(stream, delimiter=schema.delimiter)
    try:
        header = next(reader)
    except StopIteration:
        raise SchemaError("empty input: header row required") from None

    if schema.id_column not in header:
        raise SchemaError(f"CCE-ID column {schema.id_column!r} not found in header {header}")
    if schema.sr_column is not None and schema.sr_column not in header:
        raise SchemaError(f"SR column {schema.sr_column!r} not found in header {header}")

    if schema.attribute_columns is None:
        attr_cols = [c for c in header if c != schema.id_column and c != schema.sr_column]
    else:
        missing = [c for c in schema.attribute_columns if c not in header]
        if missing:
            raise SchemaError(f"attribute columns not in header: {missing}")
        attr_cols = list(schema.attribute_columns)
    if not attr_cols:
        raise SchemaError("schema leaves no attribute columns; records would be empty")

    col_index = {c: header.index(c) for c in header}
    id_idx = col_index[schema.id_column]
    sr_idx = col_index[schema.sr_column] if schema.sr_column is not None else None

    records: list[CceRecord] = []
    rejects: list[RowReject] = []
    label_sets: dict[str, frozenset[SrId]] | None = {} if sr_idx is not None else None
    seen: dict[str, int] = {}

    for row_number, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) < len(header):
            row = row + [""] * (len(header) - len(row))
        cce_id = row[id_idx].strip()
        if not CCE_ID_RE.match(cce_id):
            rejects.append(RowReject(row_number, cce_id, "malformed CCE id"))
            continue
        if cce_id in seen:
            raise CorpusError(
                f"duplicate CCE id {cce_id}: rows {seen[cce_id]} and {row_number}"
            )
        seen[cce_id] = row_number

        attributes = {c: row[col_index[c]] for c in attr_cols}
        records.append(CceRecord.make(cce_id, product, attributes))

        if sr_idx is not None:
            cell = row[sr_idx].strip()
            srs: set[SrId] = set()
            if cell:
                for token in cell.split(schema.sr_delimiter):
                    token = token.strip()
                    if token:
                        srs.add(SrId.parse(token))
            assert label_sets is not None
            label_sets[cce_id] = frozenset(srs)

    catalog: tuple[SrId, ...] = ()
    if label_sets is not None:
        catalog = tuple(sorted({sr for srs in label_sets.values() for sr in srs}))
    return Corpus(
        product=product,
        records=records,
        sr_catalog=catalog,
        label_sets=label_sets,
        rejects=rejects,
    )


def build_sr_catalog(corpora: Iterable[Corpus]) -> tuple[SrId, ...]:
    """Union of all SR tokens across labeled corpora, sorted by (family, index)."""
    union: set[SrId] = set()
    labeled = 0
    for corpus in corpora:
        if corpus.label_sets is None:
            continue
        labeled += 1
        for srs in corpus.label_sets.values():
            union.update(srs)
    if labeled == 0:
        raise CorpusError("at least one labeled corpus is required")
    return tuple(sorted(union))


def _record_line(record: CceRecord, bits: RequirementVector | None) -> str:
    doc: dict = {
        "cce_id": record.cce_id,
        "product": record.product,
        "attributes": record.attributes,
        "canonical_text": record.canonical_text,
    }
    if bits is not None:
        doc["bits"] = list(bits.bits)
    return json.dumps(doc, ensure_ascii=False, separators=(",", ":"))


def write_corpus(corpus: Corpus, path: str | Path, manifest: dict | None = None) -> None:
    """Serialize one corpus as a canonical JSONL file (header + one record per line)."""
    header = {
        "kind": CORPUS_KIND,
        "version": CORPUS_VERSION,
        "product": corpus.product,
        "sr_catalog": [sr.render() for sr in corpus.sr_catalog] if corpus.labeled else None,
        "manifest": manifest,
    }
    labels = corpus.labels() if corpus.labeled else None
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(header, ensure_ascii=False, separators=(",", ":")) + "\n")
        for record in corpus.records:
            bits = labels[record.cce_id] if labels is not None else None
            fh.write(_record_line(record, bits) + "\n")


def read_corpus(path: str | Path) -> Corpus:
    """Read a canonical corpus file, verifying record integrity."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise CorpusError(f"{path}: empty corpus file")
    header = json.loads(lines[0])
    if header.get("kind") != CORPUS_KIND:
        raise CorpusError(f"{path}: not a corpus file (kind={header.get('kind')!r})")
    if header.get("version") != CORPUS_VERSION:
        raise CorpusError(f"{path}: unsupported corpus version {header.get('version')!r}")
    product = header["product"]
    catalog_tokens = header.get("sr_catalog")
    labeled = catalog_tokens is not None
    catalog = tuple(SrId.parse(t) for t in catalog_tokens) if labeled else ()

    records: list[CceRecord] = []
    label_sets: dict[str, frozenset[SrId]] | None = {} if labeled else None
    for n, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        doc = json.loads(line)
        record = CceRecord.make(doc["cce_id"], doc.get("product", product), doc["attributes"])
        if record.canonical_text != doc["canonical_text"]:
            raise CorpusError(f"{path}:{n}: canonical_text does not match attributes")
        records.append(record)
        if labeled:
            bits = doc.get("bits")
            if bits is None:
                raise CorpusError(f"{path}:{n}: labeled corpus record missing bits")
            if len(bits) != len(catalog):
                raise CorpusError(f"{path}:{n}: bits length {len(bits)} != catalog {len(catalog)}")
            assert label_sets is not None
            label_sets[record.cce_id] = frozenset(
                sr for sr, b in zip(catalog, bits) if b
            )
    return Corpus(
        product=product,
        records=records,
        sr_catalog=catalog,
        label_sets=label_sets,
    )


def read_corpus_manifest(path: str | Path) -> dict | None:
    with open(path, "r", encoding="utf-8") as fh:
        header = json.loads(fh.readline())
    return header.get("manifest")
