"""Deterministic synthetic users: utterance audio and face images.

Audio and faces are derived from content hashes, so the same name or sentence
always produces the same bytes. Utterance audio follows the endpointer's
expectations: 0.2 s of room tone to calibrate, a loud text-dependent speech
burst, then silence that triggers the stop.
"""

from __future__ import annotations

import hashlib

import numpy as np

from greeterbot.asr.server import fingerprint
from greeterbot.endpointer import AudioChunk, EndpointConfig, Endpointer
from greeterbot.faces.image import Image

SAMPLE_RATE = 16000
QUIET_AMPLITUDE = 12


def _seed_from(text: str) -> int:
    return int.from_bytes(hashlib.sha256(text.encode("utf-8")).digest()[:8], "big")


def utterance_samples(text: str, rate: int = SAMPLE_RATE) -> np.ndarray:
    """PCM for one spoken sentence; louder, longer content for longer text."""
    rng = np.random.default_rng(_seed_from(text))
    speech_seconds = 0.8 + 0.2 * (len(text) % 4)
    blocks = []

    quiet = np.full(round(0.2 * rate), QUIET_AMPLITUDE, dtype=np.int16)
    quiet[1::2] *= -1
    blocks.append(quiet)

    n_frames = round(speech_seconds / 0.02)
    for _ in range(n_frames):
        amp = int(rng.integers(150, 240))
        frame = np.full(round(0.02 * rate), amp, dtype=np.int16)
        frame[1::2] *= -1
        blocks.append(frame)

    tail = np.full(round(1.4 * rate), QUIET_AMPLITUDE, dtype=np.int16)
    tail[1::2] *= -1
    blocks.append(tail)
    return np.concatenate(blocks)


def utterance_fixture(text: str, rate: int = SAMPLE_RATE,
                      config: EndpointConfig = EndpointConfig()) -> tuple[np.ndarray, float, str]:
    """(samples, stop_time, digest) where digest fingerprints the endpointed
    byte stream a client would send."""
    samples = utterance_samples(text, rate)
    ep = Endpointer(config)
    stop = ep.feed(AudioChunk(samples, rate))
    if stop is None:
        stop = len(samples) / rate
    payload = AudioChunk(samples[: round(stop * rate)], rate).to_bytes()
    return samples, stop, fingerprint(payload)


def build_fixture_table(texts) -> dict[str, str]:
    return {utterance_fixture(t)[2]: t for t in texts}


def face_image(name: str, width: int = 640, height: int = 480) -> Image:
    """One synthetic user: a textured bright face on a dark background. The
    texture is a fixed function of the name, so captures always match."""
    rng = np.random.default_rng(_seed_from("face:" + name))
    pixels = np.full((height, width), 10, dtype=np.uint8)
    fw, fh = 200, 240
    x = (width - fw) // 2
    y = (height - fh) // 2
    pixels[y:y + fh, x:x + fw] = rng.integers(140, 250, size=(fh, fw), dtype=np.uint8)
    return Image.from_array(pixels)


def crowd_image(names: list[str], width: int = 640, height: int = 480) -> Image:
    """Several faces, the first one biggest and pixel-identical to its solo
    face_image crop, so recognition still works on the foreground user."""
    pixels = np.full((height, width), 10, dtype=np.uint8)
    front = face_image(names[0], width, height)
    fw, fh = 200, 240
    fx, fy = 20, (height - fh) // 2
    sx, sy = (width - fw) // 2, (height - fh) // 2
    pixels[fy:fy + fh, fx:fx + fw] = front.pixels[sy:sy + fh, sx:sx + fw]

    x = fx + fw + 40
    for i, name in enumerate(names[1:]):
        rng = np.random.default_rng(_seed_from("face:" + name))
        size = max(40, 120 - 40 * i)
        y = (height - size) // 2
        if x + size < width:
            pixels[y:y + size, x:x + size] = rng.integers(140, 250, size=(size, size),
                                                          dtype=np.uint8)
        x += size + 40
    return Image.from_array(pixels)
