from __future__ import annotations

import json
import threading
import urllib.error
import urllib.request

import pytest

from flowextract.graph import serialize
from flowextract.server import serve_bundles

from conftest import write_bundle


@pytest.fixture()
def server(sample_bundle, tmp_path):
    paths = write_bundle(sample_bundle, tmp_path, "doc1")
    # serve expects <id>.json extraction files next to <id>.png
    graph_bytes = serialize(sample_bundle.graph)
    (tmp_path / "doc1.json").write_bytes(graph_bytes)
    srv = serve_bundles(tmp_path, port=0)
    thread = threading.Thread(target=srv.serve_forever, daemon=True)
    thread.start()
    base = f"http://127.0.0.1:{srv.server_address[1]}"
    yield base, tmp_path, graph_bytes
    srv.shutdown()
    srv.server_close()


def _get(url):
    try:
        with urllib.request.urlopen(url) as resp:
            return resp.status, resp.read()
    except urllib.error.HTTPError as e:
        return e.code, e.read()


def _put(url, body):
    req = urllib.request.Request(url, data=body, method="PUT")
    req.add_header("Content-Type", "application/json")
    try:
        with urllib.request.urlopen(req) as resp:
            return resp.status, resp.read()
    except urllib.error.HTTPError as e:
        return e.code, e.read()


def test_document_listing(server):
    base, _, _ = server
    status, body = _get(f"{base}/api/documents")
    assert status == 200
    docs = json.loads(body)["documents"]
    assert docs == [{"id": "doc1", "has_corrected": False}]


def test_get_image_and_graph(server):
    base, root, graph_bytes = server
    status, body = _get(f"{base}/api/documents/doc1/image")
    assert status == 200
    assert body[:8] == b"\x89PNG\r\n\x1a\n"
    status, body = _get(f"{base}/api/documents/doc1/graph")
    assert status == 200
    assert body == graph_bytes


def test_unknown_document_404(server):
    base, _, _ = server
    status, _ = _get(f"{base}/api/documents/nope/graph")
    assert status == 404
    status, _ = _get(f"{base}/api/documents/nope/image")
    assert status == 404
    status, _ = _put(f"{base}/api/documents/nope/corrected", b"{}")
    assert status == 404


def test_put_then_get_corrected_round_trip(server):
    base, root, graph_bytes = server
    status, _ = _put(f"{base}/api/documents/doc1/corrected", graph_bytes)
    assert status == 200
    status, body = _get(f"{base}/api/documents/doc1/corrected")
    assert status == 200
    assert body == graph_bytes
    assert (root / "doc1.corrected.json").read_bytes() == graph_bytes
    # listing reflects the correction
    _, body = _get(f"{base}/api/documents")
    assert json.loads(body)["documents"][0]["has_corrected"] is True


def test_put_invalid_graph_rejected_not_stored(server):
    base, root, graph_bytes = server
    payload = json.loads(graph_bytes)
    payload["edges"].append({"source": "n001", "target": "n999", "type": "flow"})
    status, body = _put(f"{base}/api/documents/doc1/corrected", json.dumps(payload).encode())
    assert status == 422
    assert b"n999" in body
    assert not (root / "doc1.corrected.json").exists()


def test_put_never_mutates_original(server):
    base, root, graph_bytes = server
    original = (root / "doc1.json").read_bytes()
    _put(f"{base}/api/documents/doc1/corrected", graph_bytes)
    assert (root / "doc1.json").read_bytes() == original


def test_get_corrected_before_put_404(server):
    base, _, _ = server
    status, _ = _get(f"{base}/api/documents/doc1/corrected")
    assert status == 404


def test_fallback_index_page(server):
    base, _, _ = server
    status, body = _get(f"{base}/")
    assert status == 200
    assert b"flowextract" in body


def test_last_writer_wins(server):
    base, root, graph_bytes = server
    payload = json.loads(graph_bytes)
    second = dict(payload)
    second["diagnostics"] = [{"note": "v2"}]
    _put(f"{base}/api/documents/doc1/corrected", graph_bytes)
    _put(f"{base}/api/documents/doc1/corrected", json.dumps(second).encode())
    status, body = _get(f"{base}/api/documents/doc1/corrected")
    assert json.loads(body)["diagnostics"] == [{"note": "v2"}]
