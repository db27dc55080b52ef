"""Timing model of chunked-streaming vs whole-file transcription.

Streaming overlaps recording, upload, and server-side decoding; the model
tracks the three stages as serial resources. The server decodes chunk i only
after chunks < i, matching incremental recognizers. The last chunk may be
shorter than the nominal chunk duration; it becomes ready when recording ends
and its upload time scales with its actual length.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from enum import Enum

from greeterbot.asr.client import stream_transcribe
from greeterbot.asr.server import MockAsrServer, ServerDelays


class Mode(Enum):
    STREAMING = "streaming"
    WHOLE_FILE = "whole_file"


@dataclass(frozen=True)
class LatencyParams:
    """recording_duration: seconds of audio. chunk_duration: seconds per chunk.
    upload_rate: multiple of real time (1.0 uploads exactly as fast as audio
    was recorded). per_message_overhead: seconds added to every upload message.
    per_chunk_processing: server decode time per chunk. finalization: server
    time after the last chunk before the transcript is ready."""

    recording_duration: float
    chunk_duration: float = 0.5
    upload_rate: float = 1.0
    per_message_overhead: float = 0.0
    per_chunk_processing: float = 0.0
    finalization: float = 0.0

    def __post_init__(self):
        if self.chunk_duration <= 0 or self.upload_rate <= 0:
            raise ValueError("chunk_duration and upload_rate must be > 0")
        if min(self.recording_duration, self.per_message_overhead,
               self.per_chunk_processing, self.finalization) < 0:
            raise ValueError("durations must be >= 0")

    @property
    def chunk_count(self) -> int:
        if self.recording_duration == 0:
            return 0
        return math.ceil(self.recording_duration / self.chunk_duration)

    def chunk_lengths(self) -> list[float]:
        T, d = self.recording_duration, self.chunk_duration
        return [min(d, T - i * d) for i in range(self.chunk_count)]


def simulate_latency(params: LatencyParams, mode: Mode) -> float:
    """Completion time (seconds from recording start to transcript)."""
    T = params.recording_duration
    n = params.per_message_overhead
    p = params.per_chunk_processing
    f = params.finalization
    K = params.chunk_count
    if K == 0:
        return f

    if mode is Mode.WHOLE_FILE:
        return T + n + T / params.upload_rate + K * p + f

    upload_end = 0.0
    proc_end = 0.0
    for i, dur in enumerate(params.chunk_lengths()):
        ready = min((i + 1) * params.chunk_duration, T)
        upload_end = max(ready, upload_end) + n + dur / params.upload_rate
        proc_end = max(upload_end, proc_end) + p
    return proc_end + f


def measure_latency(params: LatencyParams, mode: Mode,
                    server: MockAsrServer | None = None) -> float:
    """Wall-clock completion time against a live mock server.

    Recording is simulated by pacing chunk availability; upload bandwidth and
    per-message overhead by pacing sends. The server applies the per-chunk and
    finalization delays. Spins up a private server when none is given.
    """
    sample_rate = 16000
    chunk_bytes = round(params.chunk_duration * sample_rate) * 2
    own_server = server is None
    if own_server:
        server = MockAsrServer(
            ("127.0.0.1", 0),
            delays=ServerDelays(
                per_chunk=params.per_chunk_processing,
                finalization=params.finalization,
                chunk_bytes=chunk_bytes,
            ),
        ).start()
    try:
        t0 = time.monotonic()

        def wait_until(offset: float):
            remaining = t0 + offset - time.monotonic()
            if remaining > 0:
                time.sleep(remaining)

        def wire_sleep(payload: bytes):
            duration = len(payload) / 2 / sample_rate
            time.sleep(params.per_message_overhead + duration / params.upload_rate)

        def recorded_chunks():
            if mode is Mode.WHOLE_FILE:
                wait_until(params.recording_duration)
                total = round(params.recording_duration * sample_rate) * 2
                if total:
                    yield b"\x00" * total
                return
            for i, dur in enumerate(params.chunk_lengths()):
                wait_until(min((i + 1) * params.chunk_duration, params.recording_duration))
                yield b"\x00" * (round(dur * sample_rate) * 2)

        stream_transcribe(recorded_chunks(), server.address, throttle=wire_sleep)
        return time.monotonic() - t0
    finally:
        if own_server:
            server.stop()
