"""Transcription clients: chunked streaming and whole-file upload.

Both paths deliver the same bytes, so a given server state yields identical
transcripts; streaming only changes when the bytes travel.
"""

from __future__ import annotations

import socket

from greeterbot.asr import protocol
from greeterbot.asr.protocol import (
    TYPE_AUDIO,
    TYPE_ERROR,
    TYPE_FINAL,
    TYPE_TRANSCRIPT,
    Transcript,
    encode_frame,
)
from greeterbot.endpointer import AudioChunk


class TransportError(Exception):
    """Connection-level failure; chunks_sent counts audio frames that were
    fully handed to the transport before it failed."""

    def __init__(self, message: str, chunks_sent: int = 0):
        super().__init__(message)
        self.chunks_sent = chunks_sent


class RemoteError(Exception):
    """The server replied with an error frame."""


def _as_bytes(chunk) -> bytes:
    if isinstance(chunk, AudioChunk):
        return chunk.to_bytes()
    return bytes(chunk)


def _read_reply(sock, chunks_sent: int) -> Transcript:
    try:
        ftype, _, payload = protocol.read_frame(sock)
    except (ConnectionError, OSError) as exc:
        raise TransportError(f"no reply from server: {exc}", chunks_sent) from exc
    if ftype == TYPE_ERROR:
        raise RemoteError(payload.decode("utf-8", "replace"))
    if ftype != TYPE_TRANSCRIPT:
        raise TransportError(f"unexpected reply frame type {ftype}", chunks_sent)
    return Transcript.from_json(payload)


def stream_transcribe(chunks, server, *, connect=socket.create_connection,
                      throttle=None) -> Transcript:
    """Send audio chunks as they become available; return the final transcript.

    chunks: iterable of AudioChunk or raw PCM bytes. server: (host, port).
    throttle, when given, is called with each chunk's byte payload before it is
    sent (used to pace uploads in latency measurements).
    """
    sent = 0
    try:
        sock = connect(server)
    except OSError as exc:
        raise TransportError(f"connect failed: {exc}", 0) from exc
    try:
        try:
            sock.sendall(protocol.MAGIC)
            for chunk in chunks:
                payload = _as_bytes(chunk)
                if throttle is not None:
                    throttle(payload)
                sock.sendall(encode_frame(TYPE_AUDIO, sent, payload))
                sent += 1
            sock.sendall(encode_frame(TYPE_FINAL, sent))
        except (ConnectionError, OSError) as exc:
            raise TransportError(f"send failed: {exc}", sent) from exc
        return _read_reply(sock, sent)
    finally:
        sock.close()


def transcribe_whole(audio: bytes, server, *, connect=socket.create_connection) -> Transcript:
    """Upload a complete buffer as a single message and read the transcript."""
    if len(audio) == 0:
        return stream_transcribe([], server, connect=connect)
    return stream_transcribe([audio], server, connect=connect)
