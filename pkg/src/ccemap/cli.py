"""Command-line entry point: the pipeline as subcommands plus the review server.

Every command validates its inputs, writes artifacts that embed or
reference a run manifest, and exits nonzero with a machine-readable
error record on failure.  A YAML config file can predefine any flag;
explicit flags win.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import yaml

from . import __version__, transfer as tr
from .analysis import (
    DEFAULT_NUM_CLUSTERS,
    cluster_srs,
    cooccurrence,
    apply_block_order,
    block_order,
    describe_clusters,
    sr_counts,
    sr_frequency_report,
    term_frequency_report,
)
from .corpus import Corpus, CorpusSchema, SrId, parse_corpus, read_corpus, write_corpus
from .embedding import (
    EmbeddingClient,
    EmbeddingStore,
    fetch_remote,
    load_vector_file,
    merge_stores,
    write_vector_file,
)
from .errors import CcemapError
from .manifest import build_manifest, dumps as manifest_dumps, file_sha256
from .review import ReviewSession, read_export
from . import reports


def _load_config(path: str | None, section: str) -> dict:
    if path is None:
        return {}
    doc = yaml.safe_load(Path(path).read_text("utf-8")) or {}
    if not isinstance(doc, dict):
        raise CcemapError(f"config file {path} must hold a mapping of sections")
    value = doc.get(section, {})
    return value if isinstance(value, dict) else {}


def _pick(flag, cfg: dict, key: str, default):
    if flag is not None:
        return flag
    if key in cfg:
        return cfg[key]
    return default


@click.group()
@click.version_option(version=__version__, prog_name="ccemap")
def cli() -> None:
    """Map CCE configuration corpora onto IEC 62443-3-3 requirements."""


@cli.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--product", type=click.Choice(["source", "target"]), required=True)
@click.option("--id-col", default=None, help="CCE-ID column name [cce_id]")
@click.option("--sr-col", default=None, help="column holding SR tokens (labeled corpora)")
@click.option("--sr-delim", default=None, help="delimiter inside the SR cell [;]")
@click.option("--attr-col", "attr_cols", multiple=True, help="attribute columns (default: all others)")
@click.option("--delimiter", default=None, help="table delimiter [,]")
@click.option("--output", required=True, type=click.Path())
@click.option("--config", "config_path", default=None, type=click.Path(exists=True))
def ingest(input_path, product, id_col, sr_col, sr_delim, attr_cols, delimiter, output, config_path):
    """Parse a delimited CCE table into a canonical corpus file."""
    cfg = _load_config(config_path, "ingest")
    schema = CorpusSchema(
        id_column=_pick(id_col, cfg, "id_column", "cce_id"),
        sr_column=_pick(sr_col, cfg, "sr_column", None),
        sr_delimiter=_pick(sr_delim, cfg, "sr_delimiter", ";"),
        attribute_columns=tuple(attr_cols) or cfg.get("attribute_columns"),
        delimiter=_pick(delimiter, cfg, "delimiter", ","),
    )
    corpus = parse_corpus(input_path, schema, product=product)
    manifest = build_manifest(
        "ingest",
        inputs={"input": input_path},
        config={
            "product": product,
            "id_column": schema.id_column,
            "sr_column": schema.sr_column,
            "sr_delimiter": schema.sr_delimiter,
            "attribute_columns": list(schema.attribute_columns or []) or None,
            "delimiter": schema.delimiter,
        },
    )
    write_corpus(corpus, output, manifest=manifest)
    for reject in corpus.rejects:
        click.echo(
            f"rejected row {reject.row_number}: {reject.reason} ({reject.cce_value!r})", err=True
        )
    click.echo(f"wrote {output}: {len(corpus.records)} records, {len(corpus.rejects)} rejected")


@cli.command()
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--from-file", "from_file", default=None, type=click.Path(exists=True))
@click.option("--endpoint", default=None, help="embedding service URL")
@click.option("--batch", default=None, type=int, help="texts per request [32]")
@click.option("--cache", "cache_path", default=None, type=click.Path())
@click.option("--token", default=None, envvar="CCEMAP_EMBED_TOKEN")
@click.option("--concurrency", default=None, type=int)
@click.option("--normalize", is_flag=True, help="L2-normalize vectors on load")
@click.option("--output", required=True, type=click.Path())
@click.option("--config", "config_path", default=None, type=click.Path(exists=True))
def embed(corpus_path, from_file, endpoint, batch, cache_path, token, concurrency, normalize, output, config_path):
    """Attach embedding vectors to a corpus from a file or a remote service."""
    cfg = _load_config(config_path, "embed")
    from_file = _pick(from_file, cfg, "from_file", None)
    endpoint = _pick(endpoint, cfg, "endpoint", None)
    corpus = read_corpus(corpus_path)
    if (from_file is None) == (endpoint is None):
        raise click.UsageError("exactly one of --from-file or --endpoint is required")
    if from_file is not None:
        full = load_vector_file(from_file, normalize=normalize)
        missing = full.missing(corpus.ids)
        if missing:
            raise CcemapError("vector file lacks ids: " + ", ".join(missing))
        store = EmbeddingStore(dim=full.dim, fingerprint=full.fingerprint)
        for cce_id in corpus.ids:
            store.add(cce_id, full.get(cce_id))
        inputs = {"corpus": corpus_path, "vectors": from_file}
    else:
        client = EmbeddingClient(endpoint, token=token)
        store = fetch_remote(
            corpus.records,
            client,
            batch=_pick(batch, cfg, "batch", 32),
            cache_path=_pick(cache_path, cfg, "cache", None),
            concurrency=_pick(concurrency, cfg, "concurrency", 1),
        )
        inputs = {"corpus": corpus_path}
    write_vector_file(store, output)
    manifest = build_manifest(
        "embed",
        inputs=inputs,
        config={
            "provider": "file" if from_file else endpoint,
            "dim": store.dim,
            "fingerprint": store.fingerprint,
            "normalize": bool(normalize),
        },
    )
    Path(str(output) + ".manifest.json").write_text(manifest_dumps(manifest) + "\n", "utf-8")
    click.echo(f"wrote {output}: {len(store)} vectors, dim {store.dim}")


def _transfer_config(cfg: dict, metric, p, tau, k, epsilon) -> tr.TransferConfig:
    return tr.TransferConfig(
        metric=_pick(metric, cfg, "metric", tr.DEFAULT_METRIC),
        p=float(_pick(p, cfg, "p", tr.DEFAULT_P)),
        tau=float(_pick(tau, cfg, "tau", tr.DEFAULT_TAU)),
        k=int(_pick(k, cfg, "k", tr.DEFAULT_K)),
        epsilon=float(_pick(epsilon, cfg, "epsilon", tr.DEFAULT_EPSILON)),
    )


def _load_stores(paths: tuple[str, ...]) -> EmbeddingStore:
    return merge_stores([load_vector_file(path) for path in paths])


def _vector_inputs(paths: tuple[str, ...]) -> dict[str, str]:
    if len(paths) == 1:
        return {"vectors": paths[0]}
    return {f"vectors_{i}": path for i, path in enumerate(paths)}


@cli.command()
@click.option("--source-corpus", required=True, type=click.Path(exists=True))
@click.option("--target-corpus", required=True, type=click.Path(exists=True))
@click.option("--vectors", required=True, multiple=True, type=click.Path(exists=True),
              help="vector file; repeat to merge several")
@click.option("--metric", type=click.Choice(list(tr.METRICS)), default=None)
@click.option("--p", type=float, default=None)
@click.option("--tau", type=float, default=None)
@click.option("--k", type=int, default=None)
@click.option("--epsilon", type=float, default=None)
@click.option("--output", required=True, type=click.Path())
@click.option("--config", "config_path", default=None, type=click.Path(exists=True))
def transfer(source_corpus, target_corpus, vectors, metric, p, tau, k, epsilon, output, config_path):
    """Transfer requirement labels from the source corpus to the target corpus."""
    cfg = _load_config(config_path, "transfer")
    config = _transfer_config(cfg, metric, p, tau, k, epsilon)
    source = read_corpus(source_corpus)
    target = read_corpus(target_corpus)
    store = _load_stores(vectors)
    _, matrix = tr.score_pipeline(store, target, source, config)
    selections = tr.select_all(matrix, config.tau, config.k)
    manifest = build_manifest(
        "transfer",
        inputs={
            "source_corpus": source_corpus,
            "target_corpus": target_corpus,
            **_vector_inputs(vectors),
        },
        config={**config.to_dict(), "kernels": tr.BACKEND},
    )
    fingerprints = {
        "source_corpus": "sha256:" + file_sha256(source_corpus),
        "target_corpus": "sha256:" + file_sha256(target_corpus),
        "provider": store.fingerprint,
    }
    tr.write_transfer(output, matrix, selections, config, fingerprints, manifest)
    proposed = sum(len(sel.retained) for sel in selections)
    unmapped = sum(1 for sel in selections if not sel.retained)
    click.echo(
        f"wrote {output}: {len(selections)} targets, {proposed} proposed relations, "
        f"{unmapped} targets without proposals"
    )


def _parse_grid(text: str | None) -> list[float]:
    if not text:
        return []
    return [float(tok) for tok in text.replace(";", ",").split(",") if tok.strip()]


@cli.command()
@click.option("--source-corpus", required=True, type=click.Path(exists=True))
@click.option("--target-corpus", required=True, type=click.Path(exists=True))
@click.option("--vectors", required=True, multiple=True, type=click.Path(exists=True),
              help="vector file; repeat to merge several")
@click.option("--metric", type=click.Choice(list(tr.METRICS)), default=None)
@click.option("--p-grid", default=None, help="comma-separated powers, e.g. 1,2,3,5.5")
@click.option("--tau-grid", default=None, help="comma-separated thresholds [default tau]")
@click.option("--k", type=int, default=None)
@click.option("--epsilon", type=float, default=None)
@click.option("--target-m", type=float, default=None)
@click.option("--target-list-size", type=float, default=None)
@click.option("--output", required=True, type=click.Path())
@click.option("--config", "config_path", default=None, type=click.Path(exists=True))
def sweep(source_corpus, target_corpus, vectors, metric, p_grid, tau_grid, k, epsilon, target_m, target_list_size, output, config_path):
    """Evaluate diversity M(p) and list size L(p) over a parameter grid."""
    cfg = _load_config(config_path, "sweep")
    p_values = _parse_grid(_pick(p_grid, cfg, "p_grid", None))
    tau_values = _parse_grid(_pick(tau_grid, cfg, "tau_grid", None)) or [tr.DEFAULT_TAU]
    if not p_values:
        raise click.UsageError("sweep requires a non-empty --p-grid")
    metric = _pick(metric, cfg, "metric", tr.DEFAULT_METRIC)
    k = int(_pick(k, cfg, "k", tr.DEFAULT_K))
    epsilon = float(_pick(epsilon, cfg, "epsilon", tr.DEFAULT_EPSILON))
    target_m = float(_pick(target_m, cfg, "target_m", tr.DEFAULT_TARGET_M))
    target_list_size = float(
        _pick(target_list_size, cfg, "target_list_size", tr.DEFAULT_TARGET_LIST_SIZE)
    )
    source = read_corpus(source_corpus)
    target = read_corpus(target_corpus)
    store = _load_stores(vectors)
    dist = tr.distance_matrix(store, target.ids, source.ids, metric)
    result = tr.sweep(
        dist,
        source.labels(),
        source.sr_catalog,
        p_values,
        tau_values,
        k=k,
        epsilon=epsilon,
        target_m=target_m,
        target_list_size=target_list_size,
    )
    manifest = build_manifest(
        "sweep",
        inputs={
            "source_corpus": source_corpus,
            "target_corpus": target_corpus,
            **_vector_inputs(vectors),
        },
        config={
            "metric": metric,
            "p_grid": p_values,
            "tau_grid": tau_values,
            "k": k,
            "epsilon": epsilon,
            "target_m": target_m,
            "target_list_size": target_list_size,
            "kernels": tr.BACKEND,
        },
    )
    reports.write_sweep(result, output, manifest)
    click.echo(
        f"wrote {output}: {len(result.rows)} rows, recommended p={result.recommended_p} "
        f"tau={result.recommended_tau}"
    )


@cli.command()
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--output-dir", required=True, type=click.Path())
@click.option("--num-clusters", type=int, default=None, help=f"[{DEFAULT_NUM_CLUSTERS}, capped]")
@click.option("--terms", type=int, default=10, help="keywords per cluster")
@click.option("--top-terms", type=int, default=50, help="rows in the term-frequency report")
@click.option("--emit-permuted", is_flag=True, help="also write the block-sorted co-occurrence matrix")
@click.option("--relations", "relations_path", default=None, type=click.Path(exists=True),
              help="review export to summarize per-SR proposal frequencies")
def analyze(corpus_path, output_dir, num_clusters, terms, top_terms, emit_permuted, relations_path):
    """Corpus analytics: SR counts, co-occurrence, clusters, term frequencies."""
    corpus = read_corpus(corpus_path)
    if not corpus.labeled:
        raise CcemapError("analysis requires a labeled corpus")
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    inputs = {"corpus": corpus_path}
    if relations_path:
        inputs["relations"] = relations_path

    counts = sr_counts(corpus)
    matrix = cooccurrence(corpus)
    referenced = int((counts.counts > 0).sum())
    if num_clusters is None:
        num_clusters = min(DEFAULT_NUM_CLUSTERS, referenced) if referenced else 0
    config = {"num_clusters": num_clusters, "terms": terms, "top_terms": top_terms}
    manifest = build_manifest("analyze", inputs=inputs, config=config)

    written = [
        reports.write_sr_counts(counts, out / "sr_counts.csv", manifest),
        reports.write_cooccurrence(matrix, out / "cooccurrence.csv", manifest),
        reports.write_term_frequency(
            term_frequency_report(corpus.records, n=top_terms),
            out / "term_frequency.csv",
            manifest,
        ),
    ]
    if num_clusters:
        clusters = describe_clusters(cluster_srs(matrix, num_clusters), corpus, n_terms=terms)
        written.append(reports.write_clusters(clusters, out / "clusters.json", manifest))
        written.append(
            reports.write_record_clusters(corpus, clusters, out / "record_clusters.csv", manifest)
        )
        if emit_permuted:
            perm = block_order(matrix, num_clusters)
            written.append(
                reports.write_cooccurrence(
                    apply_block_order(matrix, perm), out / "cooccurrence_sorted.csv", manifest
                )
            )
    if relations_path:
        _, rows = read_export(relations_path)
        pairs = [(SrId.parse(row["sr"]), row["label"]) for row in rows]
        written.append(
            reports.write_sr_frequency(sr_frequency_report(pairs), out / "sr_frequency.csv", manifest)
        )
    for path in written:
        click.echo(f"wrote {path}")


@cli.group()
def review() -> None:
    """Create and drive review sessions."""


@review.command("create")
@click.option("--transfer", "transfer_path", required=True, type=click.Path(exists=True))
@click.option("--session", "session_dir", required=True, type=click.Path())
@click.option("--name", default=None)
@click.option("--resume", is_flag=True)
def review_create(transfer_path, session_dir, name, resume):
    """Seed a review session from a transfer output file."""
    manifest = build_manifest("review-create", inputs={"transfer": transfer_path}, config={})
    if resume and (Path(session_dir) / "session.json").exists():
        session = ReviewSession.open(session_dir)
        stored = session.meta.get("transfer_fingerprint", "")
        current = "sha256:" + file_sha256(transfer_path)
        if stored and stored != current:
            raise CcemapError(
                f"manifest mismatch: session was built from {stored}, got {current}"
            )
    else:
        session = ReviewSession.create(
            session_dir, transfer_path, name=name, resume=resume, manifest=manifest
        )
    with session:
        session.write_snapshot()
        progress = session.progress()
    click.echo(
        f"session {session.meta['name']}: {progress['total']} relations, "
        f"{progress['unmapped_targets']} unmapped targets"
    )


@review.command("label")
@click.option("--session", "session_dir", required=True, type=click.Path(exists=True))
@click.option("--cce", required=True)
@click.option("--sr", required=True)
@click.option("--label", required=True, type=click.Choice(["yes", "no", "maybe", "na"]))
@click.option("--explanation", default="")
@click.option("--annotator", required=True)
def review_label(session_dir, cce, sr, label, explanation, annotator):
    """Apply one label."""
    with ReviewSession.open(session_dir) as session:
        relation = session.apply_label(cce, sr, label, explanation=explanation, annotator=annotator)
        session.write_snapshot()
    click.echo(f"{relation.cce_id} {relation.sr.render()}: {relation.label}")


@review.command("import-labels")
@click.option("--session", "session_dir", required=True, type=click.Path(exists=True))
@click.option("--file", "file_path", required=True, type=click.Path(exists=True))
def review_import_labels(session_dir, file_path):
    """Apply labels in bulk from a CSV: cce_id,sr,label,explanation,annotator."""
    import csv as _csv

    with ReviewSession.open(session_dir) as session:
        applied = 0
        with open(file_path, "r", encoding="utf-8", newline="") as fh:
            reader = _csv.DictReader(fh)
            required = {"cce_id", "sr", "label", "explanation", "annotator"}
            missing = required - set(reader.fieldnames or [])
            if missing:
                raise CcemapError(f"label file missing columns: {sorted(missing)}")
            for row in reader:
                session.apply_label(
                    row["cce_id"],
                    row["sr"],
                    row["label"],
                    explanation=row["explanation"],
                    annotator=row["annotator"],
                )
                applied += 1
        session.write_snapshot()
    click.echo(f"applied {applied} labels")


@review.command("import-second")
@click.option("--session", "session_dir", required=True, type=click.Path(exists=True))
@click.option("--file", "file_path", required=True, type=click.Path(exists=True))
@click.option("--source", required=True, help="second-source name, e.g. the model id")
def review_import_second(session_dir, file_path, source):
    """Import a second label source from a CSV: cce_id,sr,label."""
    with ReviewSession.open(session_dir) as session:
        report = session.import_second_source(file_path, source)
        session.write_snapshot()
    click.echo(f"imported {report.imported} labels from {source}")
    for cce_id, sr in report.unmatched:
        click.echo(f"unmatched: {cce_id} {sr}", err=True)


@review.command("agreement")
@click.option("--session", "session_dir", required=True, type=click.Path(exists=True))
@click.option("--source", default=None)
@click.option("--top", type=int, default=10, help="SRs in the disagreement table")
@click.option("--output", default=None, type=click.Path())
def review_agreement(session_dir, source, top, output):
    """Agreement statistics between human labels and a second source."""
    with ReviewSession.open(session_dir) as session:
        report = session.agreement(source=source, top_sr=top)
    if output:
        manifest = build_manifest("review-agreement", inputs={}, config={"source": report.source})
        reports.write_agreement(report, output, manifest)
        click.echo(f"wrote {output}")
    per_label = {
        label: None if v is None else round(v, 4) for label, v in report.per_label.items()
    }
    click.echo(
        json.dumps(
            {
                "source": report.source,
                "total": report.total,
                "overall": round(report.overall, 4),
                "per_label": per_label,
            },
            indent=1,
        )
    )


@review.command("status")
@click.option("--session", "session_dir", required=True, type=click.Path(exists=True))
def review_status(session_dir):
    """Print progress counters as JSON."""
    with ReviewSession.open(session_dir) as session:
        click.echo(json.dumps(session.progress(), indent=1))


@cli.command()
@click.option("--session", "session_dir", required=True, type=click.Path(exists=True))
@click.option("--labels", default="yes", help="comma-separated label filter")
@click.option("--output", required=True, type=click.Path())
def export(session_dir, labels, output):
    """Export the vetted mapping dataset."""
    wanted = [tok.strip() for tok in labels.split(",") if tok.strip()]
    manifest = build_manifest("export", inputs={}, config={"labels": wanted})
    with ReviewSession.open(session_dir) as session:
        rows = session.export_dataset(output, labels_filter=wanted, manifest=manifest)
    click.echo(f"wrote {output}: {rows} rows")


@cli.command()
@click.option("--session", "session_dir", required=True, type=click.Path(exists=True))
@click.option("--corpus", "corpus_path", default=None, type=click.Path(exists=True),
              help="target corpus file for relation detail views")
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8787)
@click.option("--ui-dir", default=None, type=click.Path(exists=True))
@click.option("--token", default=None, envvar="CCEMAP_API_TOKEN")
def serve(session_dir, corpus_path, host, port, ui_dir, token):
    """Serve the review API and UI for a session."""
    import uvicorn

    from .server import create_app

    session = ReviewSession.open(session_dir)
    corpus = read_corpus(corpus_path) if corpus_path else None
    app = create_app(session, corpus=corpus, ui_dir=ui_dir, token=token)
    uvicorn.run(app, host=host, port=port)


def main(argv: list[str] | None = None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.exceptions.Abort:
        return 130
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code
    except CcemapError as exc:
        sys.stderr.write(
            json.dumps({"error": {"type": exc.code, "message": str(exc)}}) + "\n"
        )
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
