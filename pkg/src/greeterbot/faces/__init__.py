"""Face detection, embedding, and the trusted-user gallery service."""

from greeterbot.faces.detect import NoFaceError, biggest_face, detect_faces
from greeterbot.faces.embed import Embedding, area_resample, confidence, cosine, embed
from greeterbot.faces.gallery import (
    DEFAULT_THRESHOLD,
    FaceGalleryEntry,
    Gallery,
    decide_identity,
)
from greeterbot.faces.image import BoundingBox, Image, validate_capture
from greeterbot.faces.service import FaceService

__all__ = [
    "BoundingBox",
    "DEFAULT_THRESHOLD",
    "Embedding",
    "FaceGalleryEntry",
    "FaceService",
    "Gallery",
    "Image",
    "NoFaceError",
    "area_resample",
    "biggest_face",
    "confidence",
    "cosine",
    "decide_identity",
    "detect_faces",
    "embed",
    "validate_capture",
]
