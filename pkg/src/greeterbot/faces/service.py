"""HTTP face recognition service.

POST /enroll?label=<urlencoded>  body: binary PGM  -> {"entry_id": ...}
POST /query                      body: binary PGM  -> {"confidences": {...}}
GET  /gallery                    -> entries without embeddings
422 {"error": "no_face"} when no face is visible; 400 on malformed input.
"""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlparse

from greeterbot import pgm
from greeterbot.faces.detect import NoFaceError
from greeterbot.faces.gallery import Gallery
from greeterbot.faces.image import Image


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"

    def log_message(self, *args):  # quiet by default
        pass

    @property
    def gallery(self) -> Gallery:
        return self.server.gallery  # type: ignore[attr-defined]

    def _reply(self, status: int, payload: dict):
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _read_image(self) -> Image:
        length = int(self.headers.get("Content-Length", "0"))
        return Image.from_pgm(self.rfile.read(length))

    def do_GET(self):
        if urlparse(self.path).path != "/gallery":
            self._reply(404, {"error": "not_found"})
            return
        entries = [
            {"entry_id": e.entry_id, "label": e.label, "enrolled_at": e.enrolled_at}
            for e in self.gallery.entries()
        ]
        self._reply(200, {"entries": entries})

    def do_POST(self):
        url = urlparse(self.path)
        try:
            if url.path == "/enroll":
                label = parse_qs(url.query).get("label", [""])[0]
                if not label:
                    self._reply(400, {"error": "label required"})
                    return
                entry_id = self.gallery.enroll(self._read_image(), label)
                self._reply(200, {"entry_id": entry_id})
            elif url.path == "/query":
                self._reply(200, {"confidences": self.gallery.query(self._read_image())})
            else:
                self._reply(404, {"error": "not_found"})
        except NoFaceError:
            self._reply(422, {"error": "no_face"})
        except (pgm.PgmError, ValueError) as exc:
            self._reply(400, {"error": str(exc)})


class FaceService(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, gallery: Gallery, address=("127.0.0.1", 0)):
        super().__init__(address, _Handler)
        self.gallery = gallery
        self._thread: threading.Thread | None = None

    @property
    def address(self) -> tuple[str, int]:
        return self.server_address[0], self.server_address[1]

    def start(self) -> "FaceService":
        self._thread = threading.Thread(target=self.serve_forever, daemon=True)
        self._thread.start()
        return self

    def stop(self):
        self.shutdown()
        self.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5)
