import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import numpy as np
import pytest

from ccemap.corpus import CceRecord
from ccemap.embedding import (
    EmbeddingClient,
    EmbeddingStore,
    content_hash,
    fetch_remote,
    load_vector_file,
    write_vector_file,
)
from ccemap.errors import EmbeddingError


def records(n: int) -> list[CceRecord]:
    return [
        CceRecord.make(f"CCE-{40000 + i}-1", "target", {"desc": f"setting number {i}"})
        for i in range(n)
    ]


class MockEmbedHandler(BaseHTTPRequestHandler):
    """Returns unit basis vectors by arrival order of distinct texts."""

    dim = 4
    fingerprint = "mock-basis-v1"
    fail_first = 0

    def do_POST(self):
        cls = type(self)
        cls.requests += 1
        if cls.requests <= cls.fail_first:
            self.send_response(503)
            self.end_headers()
            return
        length = int(self.headers["Content-Length"])
        body = json.loads(self.rfile.read(length))
        vectors = []
        for text in body["texts"]:
            if text not in cls.assigned:
                cls.assigned[text] = len(cls.assigned) % cls.dim
            basis = [0.0] * cls.dim
            basis[cls.assigned[text]] = 1.0
            vectors.append(basis)
        payload = json.dumps(
            {"dim": cls.dim, "fingerprint": cls.fingerprint, "vectors": vectors}
        ).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def log_message(self, *args):  # silence test output
        pass


@pytest.fixture
def mock_service():
    handler = type(
        "Handler", (MockEmbedHandler,), {"assigned": {}, "requests": 0, "fail_first": 0}
    )
    server = ThreadingHTTPServer(("127.0.0.1", 0), handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        yield f"http://127.0.0.1:{server.server_port}/embed", handler
    finally:
        server.shutdown()


class TestVectorFile:
    def test_roundtrip(self, tmp_path):
        store = EmbeddingStore(dim=3, fingerprint="fp-v1")
        store.add("CCE-11111-1", np.array([0.25, -1.5, 3.0]))
        store.add("CCE-22222-2", np.array([1e-9, 2.0, -0.125]))
        path = tmp_path / "v.vec"
        write_vector_file(store, path)
        back = load_vector_file(path)
        assert back.equals(store)

    def test_header_and_size(self, tmp_path):
        path = tmp_path / "v.vec"
        path.write_text(
            "4 prov\nCCE-1-1 1 0 0 0\nCCE-2-2 0 1 0 0\nCCE-3-3 0 0 1 0\n"
        )
        store = load_vector_file(path)
        assert (store.dim, len(store)) == (4, 3)

    def test_dim_mismatch_names_offender(self, tmp_path):
        path = tmp_path / "v.vec"
        path.write_text("4 prov\nCCE-1-1 1 0 0 0\nCCE-2-2 0 1 0 0 9\n")
        with pytest.raises(EmbeddingError) as exc:
            load_vector_file(path)
        assert "CCE-2-2" in str(exc.value)

    def test_duplicate_id_fatal(self, tmp_path):
        path = tmp_path / "v.vec"
        path.write_text("2 prov\nCCE-1-1 1 0\nCCE-1-1 0 1\n")
        with pytest.raises(EmbeddingError):
            load_vector_file(path)

    def test_golden_bytes_reinterpretation(self, tmp_path):
        # values in the file are authoritative: parsed floats must equal them
        path = tmp_path / "v.vec"
        path.write_text("2 prov\nCCE-9-9 0.1 -2.5e-3\n")
        vec = load_vector_file(path).get("CCE-9-9")
        assert vec[0] == 0.1 and vec[1] == -2.5e-3

    def test_normalize_on_load(self, tmp_path):
        path = tmp_path / "v.vec"
        path.write_text("2 prov\nCCE-9-9 3 4\n")
        vec = load_vector_file(path, normalize=True).get("CCE-9-9")
        assert np.allclose(vec, [0.6, 0.8])

    def test_missing_ids_reported_exhaustively(self):
        store = EmbeddingStore(dim=2, fingerprint="x")
        store.add("CCE-1-1", np.array([1.0, 0.0]))
        assert store.missing(["CCE-2-2", "CCE-1-1", "CCE-3-3"]) == ["CCE-2-2", "CCE-3-3"]


class TestFetchRemote:
    def test_batching_ceiling_division(self, mock_service, tmp_path):
        url, handler = mock_service
        client = EmbeddingClient(url, backoff=0.01)
        store = fetch_remote(records(5), client, batch=2, cache_path=tmp_path / "c.vec")
        assert len(store) == 5
        assert client.request_count == 3

    def test_warm_cache_issues_zero_requests(self, mock_service, tmp_path):
        url, handler = mock_service
        cache = tmp_path / "c.vec"
        first = fetch_remote(records(4), EmbeddingClient(url), batch=2, cache_path=cache)
        second_client = EmbeddingClient(url)
        second = fetch_remote(records(4), second_client, batch=2, cache_path=cache)
        assert second_client.request_count == 0
        assert second.equals(first)

    def test_mock_service_contract(self, mock_service, tmp_path):
        url, handler = mock_service
        recs = records(3)
        store = fetch_remote(recs, EmbeddingClient(url), batch=3)
        for i, rec in enumerate(recs):
            expected = np.zeros(4)
            expected[i % 4] = 1.0
            assert np.array_equal(store.get(rec.cce_id), expected)
        assert store.fingerprint == "mock-basis-v1"

    def test_retry_then_success(self, mock_service, tmp_path):
        url, handler = mock_service
        handler.fail_first = 2
        client = EmbeddingClient(url, max_retries=4, backoff=0.01)
        store = fetch_remote(records(2), client, batch=2)
        assert len(store) == 2

    def test_unreachable_endpoint_fatal(self):
        client = EmbeddingClient("http://127.0.0.1:1/none", max_retries=1, backoff=0.01)
        with pytest.raises(EmbeddingError):
            fetch_remote(records(1), client, batch=1)

    def test_cache_keyed_by_content_hash(self, mock_service, tmp_path):
        url, handler = mock_service
        cache = tmp_path / "c.vec"
        fetch_remote(records(2), EmbeddingClient(url), batch=2, cache_path=cache)
        cached = load_vector_file(cache)
        for rec in records(2):
            assert content_hash(rec.canonical_text) in cached

    def test_concurrent_batches_cover_all_records(self, mock_service, tmp_path):
        url, handler = mock_service
        client = EmbeddingClient(url)
        recs = records(9)
        store = fetch_remote(recs, client, batch=2, concurrency=3)
        assert len(store) == 9
        assert store.missing([r.cce_id for r in recs]) == []
        assert client.request_count == 5

    def test_edited_text_invalidates_cache_entry(self, mock_service, tmp_path):
        url, handler = mock_service
        cache = tmp_path / "c.vec"
        fetch_remote(records(2), EmbeddingClient(url), batch=2, cache_path=cache)
        edited = [
            CceRecord.make(records(2)[0].cce_id, "target", {"desc": "changed text"}),
            records(2)[1],
        ]
        client = EmbeddingClient(url)
        fetch_remote(edited, client, batch=2, cache_path=cache)
        assert client.request_count == 1
