"""Review-bundle HTTP server backing the validation UI.

Serves extraction bundles (PNG + graph JSON pairs) read-only, accepts
schema-validated corrections as separate ``<id>.corrected.json`` files, and
hosts the UI's static assets. Deliberately minimal: localhost workbench,
no auth, filesystem persistence only.
"""

from __future__ import annotations

import json
import os
import re
import tempfile
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from . import graph as graphmod
from .errors import SchemaViolationError

_ID_RE = re.compile(r"^[A-Za-z0-9._-]+$")

_FALLBACK_PAGE = b"""<!doctype html>
<html><head><meta charset="utf-8"><title>flowextract review</title></head>
<body><h1>flowextract review server</h1>
<p>No UI bundle configured (start with --ui-dir). API endpoints:</p>
<ul>
<li>GET /api/documents</li>
<li>GET /api/documents/{id}/image</li>
<li>GET /api/documents/{id}/graph</li>
<li>PUT /api/documents/{id}/corrected</li>
</ul></body></html>
"""

_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".mjs": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".json": "application/json; charset=utf-8",
    ".png": "image/png",
    ".svg": "image/svg+xml",
    ".ico": "image/x-icon",
}


class BundleStore:
    """Filesystem access for one bundle directory."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self._lock = threading.Lock()

    def document_ids(self) -> list[str]:
        ids = []
        for png in sorted(self.root.glob("*.png")):
            stem = png.stem
            if (self.root / f"{stem}.json").exists():
                ids.append(stem)
        return ids

    def _check_id(self, doc_id: str) -> bool:
        return bool(_ID_RE.match(doc_id)) and doc_id in set(self.document_ids())

    def image_bytes(self, doc_id: str) -> bytes | None:
        if not self._check_id(doc_id):
            return None
        return (self.root / f"{doc_id}.png").read_bytes()

    def graph_bytes(self, doc_id: str) -> bytes | None:
        if not self._check_id(doc_id):
            return None
        return (self.root / f"{doc_id}.json").read_bytes()

    def corrected_bytes(self, doc_id: str) -> bytes | None:
        if not self._check_id(doc_id):
            return None
        path = self.root / f"{doc_id}.corrected.json"
        if not path.exists():
            return None
        return path.read_bytes()

    def has_corrected(self, doc_id: str) -> bool:
        return (self.root / f"{doc_id}.corrected.json").exists()

    def store_corrected(self, doc_id: str, body: bytes) -> None:
        """Validate then atomically replace; raises SchemaViolationError."""
        graphmod.parse(body)
        target = self.root / f"{doc_id}.corrected.json"
        with self._lock:
            fd, tmp = tempfile.mkstemp(dir=self.root, prefix=".corrected-", suffix=".tmp")
            try:
                with os.fdopen(fd, "wb") as f:
                    f.write(body)
                os.replace(tmp, target)
            except BaseException:
                if os.path.exists(tmp):
                    os.unlink(tmp)
                raise


def make_handler(store: BundleStore, ui_dir: Path | None):
    class ReviewHandler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def log_message(self, fmt, *args):  # tests stay quiet
            pass

        def _send(self, code: int, body: bytes, ctype: str = "application/json; charset=utf-8") -> None:
            self.send_response(code)
            self.send_header("Content-Type", ctype)
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def _send_json(self, code: int, payload: dict) -> None:
            self._send(code, (json.dumps(payload, indent=2) + "\n").encode("utf-8"))

        def _api_route(self) -> tuple[str, str] | None:
            m = re.match(r"^/api/documents/([^/]+)/(image|graph|corrected)$", self.path)
            if m:
                return m.group(1), m.group(2)
            return None

        def do_GET(self):
            if self.path == "/api/documents":
                docs = [
                    {"id": d, "has_corrected": store.has_corrected(d)} for d in store.document_ids()
                ]
                self._send_json(200, {"documents": docs})
                return
            route = self._api_route()
            if route is not None:
                doc_id, what = route
                if what == "image":
                    data = store.image_bytes(doc_id)
                    if data is None:
                        self._send_json(404, {"error": f"unknown document '{doc_id}'"})
                    else:
                        self._send(200, data, "image/png")
                elif what == "graph":
                    data = store.graph_bytes(doc_id)
                    if data is None:
                        self._send_json(404, {"error": f"unknown document '{doc_id}'"})
                    else:
                        self._send(200, data)
                else:
                    data = store.corrected_bytes(doc_id)
                    if data is None:
                        self._send_json(404, {"error": f"no corrected graph for '{doc_id}'"})
                    else:
                        self._send(200, data)
                return
            self._serve_static()

        def do_PUT(self):
            route = self._api_route()
            if route is None or route[1] != "corrected":
                self._send_json(404, {"error": "unknown endpoint"})
                return
            doc_id, _ = route
            if store.graph_bytes(doc_id) is None:
                self._send_json(404, {"error": f"unknown document '{doc_id}'"})
                return
            length = int(self.headers.get("Content-Length", "0"))
            body = self.rfile.read(length)
            try:
                store.store_corrected(doc_id, body)
            except SchemaViolationError as e:
                self._send_json(422, {"error": str(e)})
                return
            self._send_json(200, {"ok": True})

        def _serve_static(self):
            rel = self.path.lstrip("/") or "index.html"
            if ui_dir is None:
                if rel == "index.html":
                    self._send(200, _FALLBACK_PAGE, "text/html; charset=utf-8")
                else:
                    self._send_json(404, {"error": "not found"})
                return
            target = (ui_dir / rel).resolve()
            if not str(target).startswith(str(ui_dir.resolve())) or not target.is_file():
                if rel != "index.html" and (ui_dir / "index.html").is_file():
                    # unknown paths fall back to the app shell
                    target = (ui_dir / "index.html").resolve()
                    if not target.is_file():
                        self._send_json(404, {"error": "not found"})
                        return
                else:
                    self._send_json(404, {"error": "not found"})
                    return
            ctype = _CONTENT_TYPES.get(target.suffix.lower(), "application/octet-stream")
            self._send(200, target.read_bytes(), ctype)

    return ReviewHandler


def serve_bundles(
    bundle_dir: str | Path,
    port: int = 8020,
    host: str = "127.0.0.1",
    ui_dir: str | Path | None = None,
) -> ThreadingHTTPServer:
    """Construct a ready-to-run server (callers invoke serve_forever)."""
    store = BundleStore(bundle_dir)
    ui = Path(ui_dir) if ui_dir is not None else None
    handler = make_handler(store, ui)
    return ThreadingHTTPServer((host, port), handler)
