"""Framed transcription protocol over TCP.

A connection starts with the 4-byte magic "ASR1", then carries frames of
[type: u8][seq: u32][len: u32][payload], all integers big-endian. Frame types:
1 = audio (payload is raw PCM bytes, 16-bit signed little-endian), 2 = final
marker, 3 = transcript (payload is UTF-8 JSON {"text", "words", "final"}),
4 = error (payload is a UTF-8 message).
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field

MAGIC = b"ASR1"
HEADER = struct.Struct(">BII")

TYPE_AUDIO = 1
TYPE_FINAL = 2
TYPE_TRANSCRIPT = 3
TYPE_ERROR = 4

MAX_PAYLOAD = 64 * 1024 * 1024


class ProtocolError(Exception):
    """Malformed frame or handshake on the wire."""


@dataclass
class Transcript:
    text: str = ""
    words: list[tuple[str, float]] = field(default_factory=list)
    final: bool = True

    def __post_init__(self):
        self.words = [(str(t), float(c)) for t, c in self.words]
        for _, conf in self.words:
            if not 0.0 <= conf <= 1.0:
                raise ValueError(f"confidence {conf} outside [0, 1]")

    @classmethod
    def from_text(cls, text: str, confidence: float = 1.0) -> "Transcript":
        tokens = text.split()
        return cls(" ".join(tokens), [(t, confidence) for t in tokens], True)

    def to_json(self) -> bytes:
        return json.dumps(
            {"text": self.text, "words": [[t, c] for t, c in self.words], "final": self.final}
        ).encode("utf-8")

    @classmethod
    def from_json(cls, payload: bytes) -> "Transcript":
        d = json.loads(payload.decode("utf-8"))
        return cls(d["text"], [(t, c) for t, c in d["words"]], d["final"])


def encode_frame(ftype: int, seq: int, payload: bytes = b"") -> bytes:
    return HEADER.pack(ftype, seq, len(payload)) + payload


def read_exact(sock, n: int) -> bytes:
    buf = b""
    while len(buf) < n:
        part = sock.recv(n - len(buf))
        if not part:
            raise ConnectionError("peer closed the connection mid-frame")
        buf += part
    return buf


def read_frame(sock) -> tuple[int, int, bytes]:
    ftype, seq, length = HEADER.unpack(read_exact(sock, HEADER.size))
    if ftype not in (TYPE_AUDIO, TYPE_FINAL, TYPE_TRANSCRIPT, TYPE_ERROR):
        raise ProtocolError(f"unknown frame type {ftype}")
    if length > MAX_PAYLOAD:
        raise ProtocolError(f"payload length {length} exceeds limit")
    return ftype, seq, read_exact(sock, length)


def read_magic(sock) -> None:
    got = read_exact(sock, len(MAGIC))
    if got != MAGIC:
        raise ProtocolError(f"bad magic {got!r}")
