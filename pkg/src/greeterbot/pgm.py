"""Binary PGM (P5) reading and writing.

8-bit images map to uint8 arrays; maxval > 255 gives big-endian 16-bit
samples per the PGM standard, returned as uint16.
"""

from __future__ import annotations

import numpy as np


class PgmError(Exception):
    """Not a readable binary PGM."""


def _read_token(data: bytes, pos: int) -> tuple[bytes, int]:
    while pos < len(data):
        if data[pos:pos + 1].isspace():
            pos += 1
        elif data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos:pos + 1] != b"\n":
                pos += 1
        else:
            break
    start = pos
    while pos < len(data) and not data[pos:pos + 1].isspace():
        pos += 1
    if start == pos:
        raise PgmError("truncated header")
    return data[start:pos], pos


def parse_pgm(data: bytes) -> np.ndarray:
    """Decode P5 bytes into a (height, width) array."""
    if data[:2] != b"P5":
        raise PgmError("missing P5 signature")
    pos = 2
    fields = []
    for _ in range(3):
        token, pos = _read_token(data, pos)
        try:
            fields.append(int(token))
        except ValueError as exc:
            raise PgmError(f"bad header token {token!r}") from exc
    width, height, maxval = fields
    if width <= 0 or height <= 0 or not 0 < maxval < 65536:
        raise PgmError(f"bad dimensions {width}x{height} maxval {maxval}")
    pos += 1  # single whitespace after maxval
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    count = width * height
    raw = data[pos:pos + count * dtype.itemsize]
    if len(raw) != count * dtype.itemsize:
        raise PgmError("pixel data shorter than header promises")
    arr = np.frombuffer(raw, dtype=dtype).reshape(height, width)
    return arr.astype(np.uint16) if maxval > 255 else arr.copy()


def encode_pgm(pixels: np.ndarray, maxval: int | None = None) -> bytes:
    pixels = np.asarray(pixels)
    if pixels.ndim != 2:
        raise PgmError("expected a 2D array")
    if maxval is None:
        maxval = 65535 if pixels.dtype.itemsize > 1 else 255
    header = f"P5\n{pixels.shape[1]} {pixels.shape[0]}\n{maxval}\n".encode("ascii")
    if maxval > 255:
        body = pixels.astype(">u2").tobytes()
    else:
        body = pixels.astype("u1").tobytes()
    return header + body


def read_pgm(path) -> np.ndarray:
    with open(path, "rb") as f:
        return parse_pgm(f.read())


def write_pgm(path, pixels: np.ndarray, maxval: int | None = None) -> None:
    with open(path, "wb") as f:
        f.write(encode_pgm(pixels, maxval))
