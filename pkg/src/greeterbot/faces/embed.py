"""Deterministic face embedding.

Crop, area-average down to 16x16, standardize, flatten, scale to unit norm.
Plays the role of learned features: identical crops embed identically, and
cosine similarity scores gallery matches. Zero-variance crops map to the zero
vector, whose cosine against anything is defined as 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from greeterbot.faces.image import BoundingBox, Image

PATCH = 16
DIM = PATCH * PATCH
_FLAT_STD_FLOOR = 1e-9


@dataclass
class Embedding:
    vector: np.ndarray

    def __post_init__(self):
        self.vector = np.asarray(self.vector, dtype=np.float64)
        if self.vector.shape != (DIM,):
            raise ValueError(f"expected {DIM} components, got {self.vector.shape}")
        if not np.isfinite(self.vector).all():
            raise ValueError("embedding components must be finite")

    @property
    def is_zero(self) -> bool:
        return not self.vector.any()


def _overlap_weights(src: int, dst: int) -> np.ndarray:
    """(dst, src) matrix of interval overlaps for exact area averaging."""
    w = np.zeros((dst, src))
    scale = src / dst
    for t in range(dst):
        lo, hi = t * scale, (t + 1) * scale
        s0, s1 = int(np.floor(lo)), int(np.ceil(hi))
        for s in range(s0, min(s1, src)):
            w[t, s] = min(s + 1.0, hi) - max(float(s), lo)
    return w


def area_resample(crop: np.ndarray, size: int = PATCH) -> np.ndarray:
    """Exact area-weighted average resample to size x size."""
    crop = np.asarray(crop, dtype=np.float64)
    h, w = crop.shape
    ry = _overlap_weights(h, size)
    rx = _overlap_weights(w, size)
    sums = ry @ crop @ rx.T
    areas = ry.sum(axis=1)[:, None] * rx.sum(axis=1)[None, :]
    return sums / areas


def embed(img: Image, face: BoundingBox) -> Embedding:
    if not face.within(img):
        raise ValueError(f"face box {face} outside image {img.width}x{img.height}")
    crop = img.pixels[face.y:face.y + face.h, face.x:face.x + face.w]
    flat = area_resample(crop).flatten()
    std = flat.std()
    if std < _FLAT_STD_FLOOR:
        return Embedding(np.zeros(DIM))
    v = (flat - flat.mean()) / std
    return Embedding(v / np.linalg.norm(v))


def cosine(a: Embedding, b: Embedding) -> float:
    """Cosine similarity; 0 whenever either side is the zero vector."""
    if a.is_zero or b.is_zero:
        return 0.0
    return float(np.dot(a.vector, b.vector) / (np.linalg.norm(a.vector) * np.linalg.norm(b.vector)))


def confidence(a: Embedding, b: Embedding) -> float:
    """Map cosine [-1, 1] to [0, 1]; 0.5 marks a degenerate (zero) side."""
    return (1.0 + cosine(a, b)) / 2.0
