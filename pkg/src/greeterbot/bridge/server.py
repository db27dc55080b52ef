"""HTTP front of the bridge.

GET  /page        current page as JSON
GET  /events      server-sent events: one `data: <page json>` per update
POST /input       {"value": "..."} records the pending typed input
POST /confirm     fires the back-channel send (409 without a listener)
POST /backchannel {"port": N} registers the session's listener out-of-process
GET  /            static UI assets, when a directory is configured
"""

from __future__ import annotations

import json
import mimetypes
import queue
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import urlparse

from greeterbot.bridge.core import Bridge

STATIC_DIR = Path(__file__).parent / "static"


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"

    def log_message(self, *args):
        pass

    @property
    def bridge(self) -> Bridge:
        return self.server.bridge  # type: ignore[attr-defined]

    def _json(self, status: int, payload: dict):
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _read_json(self) -> dict:
        length = int(self.headers.get("Content-Length", "0"))
        raw = self.rfile.read(length)
        data = json.loads(raw.decode("utf-8"))
        if not isinstance(data, dict):
            raise ValueError("expected a JSON object")
        return data

    def do_GET(self):
        path = urlparse(self.path).path
        if path == "/page":
            self._json(200, self.bridge.page())
        elif path == "/events":
            self._serve_events()
        else:
            self._serve_static(path)

    def _serve_events(self):
        self.send_response(200)
        self.send_header("Content-Type", "text/event-stream")
        self.send_header("Cache-Control", "no-cache")
        self.send_header("Transfer-Encoding", "chunked")
        self.end_headers()

        def write_event(payload: dict):
            data = f"data: {json.dumps(payload)}\n\n".encode("utf-8")
            self.wfile.write(f"{len(data):X}\r\n".encode("ascii") + data + b"\r\n")
            self.wfile.flush()

        q = self.bridge.subscribe()
        try:
            # current page first, so late subscribers start in sync
            write_event(self.bridge.page())
            while not self.server.stopping:  # type: ignore[attr-defined]
                try:
                    update = q.get(timeout=0.2)
                except queue.Empty:
                    continue
                write_event(update)
            self.wfile.write(b"0\r\n\r\n")
        except (BrokenPipeError, ConnectionResetError):
            pass
        finally:
            self.bridge.unsubscribe(q)

    def _serve_static(self, path: str):
        root = self.server.static_dir  # type: ignore[attr-defined]
        if root is None:
            self._json(404, {"error": "not_found"})
            return
        rel = "index.html" if path == "/" else path.lstrip("/")
        target = (root / rel).resolve()
        if not str(target).startswith(str(root.resolve())) or not target.is_file():
            self._json(404, {"error": "not_found"})
            return
        body = target.read_bytes()
        ctype = mimetypes.guess_type(str(target))[0] or "application/octet-stream"
        self.send_response(200)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_POST(self):
        path = urlparse(self.path).path
        try:
            if path == "/input":
                data = self._read_json()
                if "value" not in data or not isinstance(data["value"], str):
                    raise ValueError("body must carry a string 'value'")
                self.bridge.post_input(data["value"])
                self._json(200, {"ok": True})
            elif path == "/confirm":
                if self.bridge.confirm():
                    self._json(200, {"ok": True})
                else:
                    self._json(409, {"error": "no_backchannel"})
            elif path == "/backchannel":
                data = self._read_json()
                self.bridge.set_backchannel(int(data["port"]), data.get("host", "127.0.0.1"))
                self._json(200, {"ok": True})
            else:
                self._json(404, {"error": "not_found"})
        except (ValueError, KeyError, json.JSONDecodeError) as exc:
            self._json(400, {"error": str(exc)})


class BridgeServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, bridge: Bridge, address=("127.0.0.1", 0),
                 static_dir: Path | None = None):
        super().__init__(address, _Handler)
        self.bridge = bridge
        self.stopping = False
        if static_dir is None and STATIC_DIR.is_dir():
            static_dir = STATIC_DIR
        self.static_dir = static_dir
        self._thread: threading.Thread | None = None

    @property
    def address(self) -> tuple[str, int]:
        return self.server_address[0], self.server_address[1]

    def start(self) -> "BridgeServer":
        self._thread = threading.Thread(target=self.serve_forever, daemon=True)
        self._thread.start()
        return self

    def stop(self):
        self.stopping = True
        self.shutdown()
        self.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5)
