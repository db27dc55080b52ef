"""Fixture-backed mock transcription server.

Stands in for the remote speech-to-text service: transcripts are looked up by
the SHA-256 fingerprint of the concatenated audio payload bytes, so tests are
deterministic and need no credentials. Optional artificial delays make latency
measurements against it physically real.
"""

from __future__ import annotations

import hashlib
import json
import socketserver
import threading
import time
from dataclasses import dataclass

from greeterbot.asr import protocol
from greeterbot.asr.protocol import (
    TYPE_AUDIO,
    TYPE_ERROR,
    TYPE_FINAL,
    ProtocolError,
    Transcript,
    encode_frame,
)


def fingerprint(audio: bytes) -> str:
    return hashlib.sha256(audio).hexdigest()


@dataclass(frozen=True)
class ServerDelays:
    """Artificial processing delays, all in seconds.

    per_message is slept once per received frame, per_chunk once per
    chunk_bytes of audio payload (rounded up), finalization once before the
    transcript is sent.
    """

    per_message: float = 0.0
    per_chunk: float = 0.0
    finalization: float = 0.0
    chunk_bytes: int = 16000

    @property
    def active(self) -> bool:
        return self.per_message > 0 or self.per_chunk > 0 or self.finalization > 0


class _Handler(socketserver.BaseRequestHandler):
    def handle(self):
        server: MockAsrServer = self.server  # type: ignore[assignment]
        sock = self.request
        try:
            protocol.read_magic(sock)
            audio = bytearray()
            chunks = 0
            while True:
                ftype, _, payload = protocol.read_frame(sock)
                if ftype == TYPE_AUDIO:
                    server.delays_sleep_message()
                    server.delays_sleep_chunks(len(payload))
                    audio.extend(payload)
                    chunks += 1
                    if server.fail_after_chunks is not None and chunks >= server.fail_after_chunks:
                        sock.close()
                        return
                elif ftype == TYPE_FINAL:
                    server.delays_sleep_message()
                    time.sleep(server.delays.finalization)
                    transcript = server.lookup(bytes(audio))
                    sock.sendall(encode_frame(protocol.TYPE_TRANSCRIPT, 0, transcript.to_json()))
                    return
                else:
                    raise ProtocolError(f"client may not send frame type {ftype}")
        except ProtocolError as exc:
            try:
                sock.sendall(encode_frame(TYPE_ERROR, 0, str(exc).encode("utf-8")))
            except OSError:
                pass
        except (ConnectionError, OSError):
            pass


class MockAsrServer(socketserver.ThreadingTCPServer):
    """Serve fixture transcripts over the framed protocol.

    fixtures maps hex SHA-256 digests of payload bytes to transcript text;
    unknown digests get an empty, low-confidence transcript. Sessions are
    handled concurrently; the fixture table is read-only after startup.
    """

    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, address=("127.0.0.1", 0), fixtures: dict[str, str] | None = None,
                 delays: ServerDelays = ServerDelays()):
        super().__init__(address, _Handler)
        self.fixtures = dict(fixtures or {})
        self.delays = delays
        self.fail_after_chunks: int | None = None  # fault injection for tests
        self._thread: threading.Thread | None = None

    @property
    def address(self) -> tuple[str, int]:
        return self.server_address[0], self.server_address[1]

    def lookup(self, audio: bytes) -> Transcript:
        text = self.fixtures.get(fingerprint(audio))
        if text is None:
            return Transcript("", [], True)
        return Transcript.from_text(text)

    def delays_sleep_message(self):
        if self.delays.per_message > 0:
            time.sleep(self.delays.per_message)

    def delays_sleep_chunks(self, payload_len: int):
        if self.delays.per_chunk > 0 and payload_len > 0:
            units = -(-payload_len // self.delays.chunk_bytes)
            time.sleep(self.delays.per_chunk * units)

    def start(self) -> "MockAsrServer":
        self._thread = threading.Thread(target=self.serve_forever, daemon=True)
        self._thread.start()
        return self

    def stop(self):
        self.shutdown()
        self.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5)


def serve_mock(fixtures: dict[str, str], listen=("127.0.0.1", 0),
               delays: ServerDelays = ServerDelays()) -> MockAsrServer:
    """Start a mock server in a background thread and return its handle."""
    return MockAsrServer(listen, fixtures, delays).start()


def load_fixtures(path) -> dict[str, str]:
    with open(path, encoding="utf-8") as f:
        table = json.load(f)
    if not all(isinstance(k, str) and isinstance(v, str) for k, v in table.items()):
        raise ValueError(f"{path}: fixture file must map hex digests to transcript text")
    return table
