"""Reference face detector: bright 4-connected blobs.

A stand-in with fully specified behavior so gallery semantics are testable;
any learned detector can replace it behind find_faces().
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from greeterbot.faces.image import BoundingBox, Image

BRIGHTNESS_THRESHOLD = 128
MIN_AREA_PX = 9

_CROSS = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)


class NoFaceError(Exception):
    """No face is visible in the picture."""


def detect_faces(img: Image) -> list[BoundingBox]:
    """Boxes of bright connected components, ordered by (y, x); may be empty."""
    mask = img.pixels >= BRIGHTNESS_THRESHOLD
    labels, count = ndimage.label(mask, structure=_CROSS)
    boxes = []
    for idx, sl in enumerate(ndimage.find_objects(labels), start=1):
        if sl is None:
            continue
        if np.count_nonzero(labels[sl] == idx) < MIN_AREA_PX:
            continue
        ys, xs = sl
        boxes.append(BoundingBox(xs.start, ys.start, xs.stop - xs.start, ys.stop - ys.start))
    boxes.sort(key=lambda b: (b.y, b.x))
    return boxes


def biggest_face(boxes: list[BoundingBox]) -> BoundingBox:
    """The largest-area box; ties go to the smallest (y, x). The robot's user
    is assumed to be in the foreground."""
    if not boxes:
        raise NoFaceError("no face is visible")
    return min(boxes, key=lambda b: (-b.area, b.y, b.x))
