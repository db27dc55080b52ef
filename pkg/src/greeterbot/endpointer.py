"""Utterance endpointing by a calibrated energy threshold over a sliding window.

The first 200 ms of a recording are assumed to be ambient noise (the user has
just touched the robot's hand and has not started speaking). Their average RMS
becomes the silence threshold tau. Afterwards the mean RMS of a 1 s window of
0.2 s frames, re-evaluated every 0.2 s, is compared against tau * (1 + epsilon);
the first window at or below it ends the utterance. A relative tolerance keeps
the rule scale-invariant, so loud rooms behave like quiet rooms.
"""

from __future__ import annotations

import struct
import wave
from collections import deque
from dataclasses import dataclass

import numpy as np

DEFAULT_SAMPLE_RATE = 16000


class AudioFormatError(Exception):
    """Unreadable or unsupported audio input."""


@dataclass
class AudioChunk:
    """A window of signed 16-bit PCM samples."""

    samples: np.ndarray
    sample_rate: int = DEFAULT_SAMPLE_RATE
    start_time: float = 0.0

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.int16)
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be > 0")
        if self.samples.size == 0:
            raise ValueError("samples must be non-empty")

    def to_bytes(self) -> bytes:
        """Raw PCM bytes, 16-bit signed little-endian."""
        return self.samples.astype("<i2").tobytes()


@dataclass(frozen=True)
class EnergyFrame:
    rms: float
    duration: float
    index: int


@dataclass(frozen=True)
class SilenceThreshold:
    tau_s: float
    epsilon: float = 0.1

    @property
    def stop_level(self) -> float:
        return self.tau_s * (1.0 + self.epsilon)


@dataclass(frozen=True)
class EndpointConfig:
    calibration_duration: float = 0.2
    window_length: float = 1.0
    window_shift: float = 0.2
    epsilon: float = 0.1
    max_duration: float = 15.0

    def __post_init__(self):
        ratio = self.window_length / self.window_shift
        if abs(ratio - round(ratio)) > 1e-9:
            raise ValueError("window_length must be an integer multiple of window_shift")
        if abs(self.calibration_duration - self.window_shift) > 1e-12:
            raise ValueError("calibration_duration must equal window_shift")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be > 0")

    @property
    def window_frames(self) -> int:
        return round(self.window_length / self.window_shift)


def frame_energy(samples) -> float:
    """RMS of a PCM window: sqrt(mean(sample^2))."""
    arr = np.asarray(samples, dtype=np.float64)
    if arr.size == 0:
        raise ValueError("cannot compute energy of an empty window")
    return float(np.sqrt(np.mean(arr * arr)))


def calibrate(samples, sample_rate: int, epsilon: float = 0.1) -> SilenceThreshold | None:
    """Silence threshold from the first 200 ms: mean RMS of ten 20 ms sub-frames.

    Returns None when fewer than 200 ms of samples are available; the caller
    should buffer and retry.
    """
    needed = round(0.2 * sample_rate)
    arr = np.asarray(samples, dtype=np.float64)
    if arr.size < needed:
        return None
    subs = np.array_split(arr[:needed], 10)
    tau = float(np.mean([frame_energy(s) for s in subs]))
    return SilenceThreshold(tau, epsilon)


class Endpointer:
    """Streaming stop-of-speech detector.

    feed() returns None to keep recording and the stop time in seconds once
    the utterance has ended. The decision depends only on the byte stream, not
    on how it is sliced into chunks. Single-owner: one consumer feeds chunks
    in order; feeding after a stop raises.
    """

    def __init__(self, config: EndpointConfig = EndpointConfig()):
        self.config = config
        self.threshold: SilenceThreshold | None = None
        self._sample_rate: int | None = None
        self._frame_size = 0
        self._pending: list[np.ndarray] = []
        self._pending_count = 0
        self._window: deque[float] = deque(maxlen=config.window_frames)
        self._frames_done = 0
        self._total_samples = 0
        self.stop_time: float | None = None
        self.frames: list[EnergyFrame] = []

    @property
    def stopped(self) -> bool:
        return self.stop_time is not None

    def feed(self, chunk: AudioChunk) -> float | None:
        if self.stopped:
            raise RuntimeError("endpointer already stopped; create a new one")
        if self._sample_rate is None:
            self._sample_rate = chunk.sample_rate
            self._frame_size = round(self.config.window_shift * chunk.sample_rate)
        elif chunk.sample_rate != self._sample_rate:
            raise ValueError(
                f"sample rate changed mid-stream: {chunk.sample_rate} != {self._sample_rate}"
            )

        self._pending.append(chunk.samples)
        self._pending_count += chunk.samples.size
        self._total_samples += chunk.samples.size

        while self._pending_count >= self._frame_size:
            frame = self._pop_frame()
            decision = self._process_frame(frame)
            if decision is not None:
                self.stop_time = decision
                return decision

        # cap applies even when the boundary falls inside a frame
        if self._total_samples / self._sample_rate >= self.config.max_duration:
            self.stop_time = self.config.max_duration
            return self.stop_time
        return None

    def _pop_frame(self) -> np.ndarray:
        buf = np.concatenate(self._pending) if len(self._pending) > 1 else self._pending[0]
        frame, rest = buf[: self._frame_size], buf[self._frame_size:]
        self._pending = [rest] if rest.size else []
        self._pending_count = rest.size
        return frame

    def _process_frame(self, frame: np.ndarray) -> float | None:
        frame_duration = self._frame_size / self._sample_rate
        index = self._frames_done
        self._frames_done += 1
        boundary = self._frames_done * frame_duration

        if self.threshold is None:
            self.threshold = calibrate(frame, self._sample_rate, self.config.epsilon)
            return None

        rms = frame_energy(frame)
        self.frames.append(EnergyFrame(rms, frame_duration, index))
        self._window.append(rms)

        if boundary >= self.config.max_duration:
            return self.config.max_duration
        if len(self._window) == self.config.window_frames:
            if float(np.mean(self._window)) <= self.threshold.stop_level:
                return boundary
        return None


def read_wav_mono(path) -> tuple[np.ndarray, int]:
    """Samples and rate from a 16-bit mono PCM WAV file."""
    try:
        with wave.open(str(path), "rb") as w:
            if w.getcomptype() != "NONE":
                raise AudioFormatError(f"{path}: compressed WAV not supported")
            if w.getnchannels() != 1:
                raise AudioFormatError(f"{path}: expected mono, got {w.getnchannels()} channels")
            if w.getsampwidth() != 2:
                raise AudioFormatError(f"{path}: expected 16-bit samples")
            raw = w.readframes(w.getnframes())
            return np.frombuffer(raw, dtype="<i2"), w.getframerate()
    except (wave.Error, EOFError, struct.error) as exc:
        raise AudioFormatError(f"{path}: not a PCM WAV file ({exc})") from exc


def write_wav_mono(path, samples: np.ndarray, sample_rate: int) -> None:
    with wave.open(str(path), "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(2)
        w.setframerate(sample_rate)
        w.writeframes(np.asarray(samples, dtype="<i2").tobytes())


def endpoint_stream(samples: np.ndarray, sample_rate: int,
                    config: EndpointConfig = EndpointConfig()) -> float:
    """Stop time for a complete recording; falls back to the recording's end
    when no stop fires before the stream runs out."""
    ep = Endpointer(config)
    decision = ep.feed(AudioChunk(samples, sample_rate))
    if decision is not None:
        return decision
    return len(samples) / sample_rate


def endpoint_file(path, config: EndpointConfig = EndpointConfig()):
    """Endpoint a WAV file. Returns (stop_time, trimmed_samples, sample_rate);
    the trimmed audio covers [0, stop_time)."""
    samples, rate = read_wav_mono(path)
    stop = endpoint_stream(samples, rate, config)
    return stop, samples[: round(stop * rate)], rate
