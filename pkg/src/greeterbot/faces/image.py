"""Grayscale images and bounding boxes for the face pipeline."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from greeterbot import pgm

NATIVE_WIDTH = 640
NATIVE_HEIGHT = 480


@dataclass
class Image:
    """8-bit grayscale image, row-major."""

    width: int
    height: int
    pixels: np.ndarray

    def __post_init__(self):
        self.pixels = np.asarray(self.pixels, dtype=np.uint8)
        if self.pixels.shape != (self.height, self.width):
            raise ValueError(
                f"pixels shape {self.pixels.shape} != (height={self.height}, width={self.width})"
            )

    @classmethod
    def from_array(cls, pixels: np.ndarray) -> "Image":
        pixels = np.asarray(pixels, dtype=np.uint8)
        return cls(pixels.shape[1], pixels.shape[0], pixels)

    def to_pgm(self) -> bytes:
        return pgm.encode_pgm(self.pixels, 255)

    @classmethod
    def from_pgm(cls, data: bytes) -> "Image":
        arr = pgm.parse_pgm(data)
        if arr.dtype != np.uint8:
            raise pgm.PgmError("face images must be 8-bit")
        return cls.from_array(arr)


@dataclass(frozen=True)
class BoundingBox:
    x: int
    y: int
    w: int
    h: int

    def __post_init__(self):
        if self.w < 1 or self.h < 1:
            raise ValueError("boxes must be at least 1x1")

    @property
    def area(self) -> int:
        return self.w * self.h

    def within(self, img: Image) -> bool:
        return (
            0 <= self.x and 0 <= self.y
            and self.x + self.w <= img.width
            and self.y + self.h <= img.height
        )


def validate_capture(img: Image) -> Image:
    """Enforce the camera's native capture size.

    Higher resolutions are rejected: fetching them from the robot takes several
    seconds, which stalls the interaction loop.
    """
    if img.width > NATIVE_WIDTH or img.height > NATIVE_HEIGHT:
        warnings.warn(
            f"capture {img.width}x{img.height} exceeds native {NATIVE_WIDTH}x{NATIVE_HEIGHT}; "
            "high-resolution capture is too slow for interactive use",
            stacklevel=2,
        )
        raise ValueError("capture resolution above native size")
    return img
