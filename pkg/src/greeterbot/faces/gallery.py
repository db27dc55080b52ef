"""The trusted-user gallery: enroll labeled faces, score probes against every
entry, decide identity against a threshold."""

from __future__ import annotations

import json
import os
import threading
import time
from dataclasses import dataclass

import numpy as np

from greeterbot.faces.detect import NoFaceError, biggest_face, detect_faces
from greeterbot.faces.embed import Embedding, confidence, embed
from greeterbot.faces.image import Image

DEFAULT_THRESHOLD = 0.8


@dataclass
class FaceGalleryEntry:
    entry_id: str
    label: str
    embedding: Embedding
    enrolled_at: float

    def to_dict(self) -> dict:
        return {
            "entry_id": self.entry_id,
            "label": self.label,
            "embedding": [float(x) for x in self.embedding.vector],
            "enrolled_at": self.enrolled_at,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FaceGalleryEntry":
        return cls(d["entry_id"], d["label"], Embedding(np.array(d["embedding"])), d["enrolled_at"])


def decide_identity(confidences: dict[str, float], entries: list[FaceGalleryEntry],
                    threshold: float = DEFAULT_THRESHOLD) -> str | None:
    """Label of the highest-confidence entry at or above the threshold, else
    None. Ties go to the earliest-enrolled entry."""
    if not 0.0 <= threshold <= 1.0:
        raise ValueError("threshold must lie in [0, 1]")
    best: FaceGalleryEntry | None = None
    best_conf = -1.0
    for entry in entries:  # enrollment order; strict > keeps the earliest on ties
        c = confidences.get(entry.entry_id)
        if c is not None and c > best_conf:
            best_conf = c
            best = entry
    if best is None or best_conf < threshold:
        return None
    return best.label


class Gallery:
    """Single-writer gallery. Enrolls serialize under a lock and persist to
    disk when a path is set; queries score against a consistent snapshot."""

    def __init__(self, path=None, clock=time.time):
        self.path = path
        self.clock = clock
        self._entries: list[FaceGalleryEntry] = []
        self._lock = threading.Lock()
        self._next_id = 1
        if path is not None and os.path.exists(path):
            self.load(path)

    # -- persistence ---------------------------------------------------------

    def load(self, path) -> None:
        with open(path, encoding="utf-8") as f:
            records = json.load(f)
        with self._lock:
            self._entries = [FaceGalleryEntry.from_dict(r) for r in records]
            self._next_id = len(self._entries) + 1

    def save(self, path=None) -> None:
        path = path or self.path
        if path is None:
            return
        with open(path, "w", encoding="utf-8") as f:
            json.dump([e.to_dict() for e in self.entries()], f)

    # -- core operations -----------------------------------------------------

    def entries(self) -> list[FaceGalleryEntry]:
        with self._lock:
            return list(self._entries)

    def __len__(self) -> int:
        with self._lock:
            return len(self._entries)

    def enroll(self, img: Image, label: str) -> str:
        """Detect the biggest face, embed it, append an entry; returns its id."""
        if not label:
            raise ValueError("label must be non-empty")
        face = biggest_face(detect_faces(img))
        embedding = embed(img, face)
        with self._lock:
            existing = {e.entry_id for e in self._entries}
            while f"e{self._next_id:04d}" in existing:
                self._next_id += 1
            entry = FaceGalleryEntry(f"e{self._next_id:04d}", label, embedding, self.clock())
            self._next_id += 1
            self._entries.append(entry)
        self.save()
        return entry.entry_id

    def query(self, img: Image) -> dict[str, float]:
        """Confidence in [0, 1] for every enrolled entry against the biggest
        face in the picture; raises NoFaceError when nothing is detected."""
        face = biggest_face(detect_faces(img))
        probe = embed(img, face)
        return {e.entry_id: confidence(probe, e.embedding) for e in self.entries()}

    def decide(self, confidences: dict[str, float],
               threshold: float = DEFAULT_THRESHOLD) -> str | None:
        return decide_identity(confidences, self.entries(), threshold)

    def identify(self, img: Image, threshold: float = DEFAULT_THRESHOLD) -> str | None:
        return self.decide(self.query(img), threshold)


__all__ = [
    "DEFAULT_THRESHOLD",
    "FaceGalleryEntry",
    "Gallery",
    "NoFaceError",
    "decide_identity",
]
