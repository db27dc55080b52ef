import json
import math
import threading

import numpy as np
import pytest
import requests

from greeterbot.faces import (
    BoundingBox,
    FaceService,
    Gallery,
    Image,
    NoFaceError,
    biggest_face,
    confidence,
    decide_identity,
    detect_faces,
    embed,
    validate_capture,
)
from greeterbot.faces.embed import Embedding
from oracles import flood_fill_boxes, naive_cosine, naive_embed


def dark_image(w=64, h=48):
    return Image.from_array(np.full((h, w), 10, dtype=np.uint8))


def with_rect(img, x, y, w, h, value=200):
    img.pixels[y:y + h, x:x + w] = value
    return img


def face_image(seed=0, w=64, h=48, box=(8, 8, 32, 24)):
    """Dark field with one textured bright rectangle."""
    rng = np.random.default_rng(seed)
    img = dark_image(w, h)
    x, y, bw, bh = box
    img.pixels[y:y + bh, x:x + bw] = rng.integers(140, 250, size=(bh, bw), dtype=np.uint8)
    return img


# ---------------------------------------------------------------- detection

def test_detect_all_black_is_empty():
    assert detect_faces(Image.from_array(np.zeros((48, 64), dtype=np.uint8))) == []


def test_detect_single_square():
    img = with_rect(dark_image(), 5, 5, 10, 10)
    assert detect_faces(img) == [BoundingBox(5, 5, 10, 10)]


def test_detect_small_components_filtered():
    img = with_rect(dark_image(), 5, 5, 2, 4)  # 8 px < 9
    assert detect_faces(img) == []


def test_detect_matches_flood_fill_oracle():
    rng = np.random.default_rng(13)
    for _ in range(25):
        img = dark_image(80, 60)
        for _ in range(int(rng.integers(1, 6))):
            w, h = int(rng.integers(2, 15)), int(rng.integers(2, 15))
            x = int(rng.integers(0, 80 - w))
            y = int(rng.integers(0, 60 - h))
            with_rect(img, x, y, w, h)
        got = [(b.x, b.y, b.w, b.h) for b in detect_faces(img)]
        assert got == flood_fill_boxes(img.pixels)


def test_biggest_face_takes_max_area():
    small = BoundingBox(0, 0, 5, 5)
    big = BoundingBox(20, 20, 10, 10)
    assert biggest_face([small, big]) == big


def test_biggest_face_single():
    b = BoundingBox(3, 4, 5, 6)
    assert biggest_face([b]) == b


def test_biggest_face_tie_breaks_by_position():
    a = BoundingBox(0, 0, 4, 4)
    b = BoundingBox(10, 10, 4, 4)
    assert biggest_face([b, a]) == a


def test_biggest_face_empty_raises():
    with pytest.raises(NoFaceError):
        biggest_face([])


# ---------------------------------------------------------------- embedding

def test_embed_uniform_crop_is_zero_vector():
    img = with_rect(dark_image(), 4, 4, 20, 20, value=180)
    e = embed(img, BoundingBox(4, 4, 20, 20))
    assert e.is_zero


def test_embed_is_unit_norm():
    img = face_image(seed=3)
    e = embed(img, detect_faces(img)[0])
    assert np.linalg.norm(e.vector) == pytest.approx(1.0, abs=1e-9)


def test_embed_matches_naive_oracle():
    rng = np.random.default_rng(21)
    gradient = np.add.outer(np.arange(32), np.arange(32)) * 3 % 256
    crops = [gradient.astype(np.uint8),
             rng.integers(0, 256, size=(33, 47), dtype=np.uint8),
             rng.integers(0, 256, size=(17, 17), dtype=np.uint8)]
    for crop in crops:
        img = Image.from_array(crop)
        got = embed(img, BoundingBox(0, 0, crop.shape[1], crop.shape[0]))
        np.testing.assert_allclose(got.vector, naive_embed(crop.astype(float)), atol=1e-9)


def test_embed_out_of_bounds_rejected():
    with pytest.raises(ValueError):
        embed(dark_image(), BoundingBox(60, 40, 10, 10))


def test_confidence_with_zero_vector_is_half():
    z = Embedding(np.zeros(256))
    v = np.zeros(256)
    v[0] = 1.0
    assert confidence(z, Embedding(v)) == 0.5


# ------------------------------------------------------------------ gallery

def test_enroll_grows_gallery():
    g = Gallery()
    g.enroll(face_image(seed=1), "ada")
    assert len(g) == 1


def test_enroll_faceless_raises():
    with pytest.raises(NoFaceError):
        Gallery().enroll(dark_image(), "ada")


def test_query_faceless_raises():
    g = Gallery()
    g.enroll(face_image(seed=1), "ada")
    with pytest.raises(NoFaceError):
        g.query(dark_image())


def test_enroll_empty_label_rejected():
    with pytest.raises(ValueError):
        Gallery().enroll(face_image(seed=1), "")


def test_enroll_uses_biggest_face():
    img = face_image(seed=5, w=128, h=96, box=(10, 10, 40, 40))
    rng = np.random.default_rng(6)
    img.pixels[60:70, 80:90] = rng.integers(140, 250, size=(10, 10), dtype=np.uint8)
    g = Gallery()
    g.enroll(img, "ada")
    expected = embed(img, BoundingBox(10, 10, 40, 40))
    np.testing.assert_array_equal(g.entries()[0].embedding.vector, expected.vector)


def test_query_empty_gallery_is_empty_mapping():
    assert Gallery().query(face_image(seed=1)) == {}


def test_self_match_confidence_is_one():
    g = Gallery()
    img = face_image(seed=7)
    eid = g.enroll(img, "ada")
    assert g.query(img)[eid] == pytest.approx(1.0, abs=1e-9)


def test_confidences_match_cosine_oracle():
    rng = np.random.default_rng(33)
    g = Gallery()
    ids = [g.enroll(face_image(seed=100 + i), f"person{i}") for i in range(5)]
    probe_img = face_image(seed=200)
    probe = embed(probe_img, detect_faces(probe_img)[0])
    got = g.query(probe_img)
    for eid, entry in zip(ids, g.entries()):
        expected = (1.0 + naive_cosine(probe.vector, entry.embedding.vector)) / 2.0
        assert got[eid] == pytest.approx(expected, abs=1e-9)
    assert all(0.0 <= c <= 1.0 for c in got.values())


def test_cosine_symmetry():
    a_img, b_img = face_image(seed=41), face_image(seed=42)
    a = embed(a_img, detect_faces(a_img)[0])
    b = embed(b_img, detect_faces(b_img)[0])
    assert confidence(a, b) == pytest.approx(confidence(b, a), abs=1e-12)


def test_decide_identity_cases():
    g = Gallery()
    ada = g.enroll(face_image(seed=1), "ada")
    bo = g.enroll(face_image(seed=2), "bo")
    assert decide_identity({}, g.entries(), 0.8) is None
    assert decide_identity({ada: 0.95, bo: 0.60}, g.entries(), 0.8) == "ada"
    assert decide_identity({ada: 0.79}, g.entries(), 0.8) is None
    # threshold is inclusive, tie goes to the earliest enrolled
    assert decide_identity({ada: 0.8, bo: 0.8}, g.entries(), 0.8) == "ada"


def test_decide_identity_argmax_invariance():
    g = Gallery()
    ids = [g.enroll(face_image(seed=50 + i), f"p{i}") for i in range(4)]
    rng = np.random.default_rng(8)
    for _ in range(50):
        confs = {eid: float(rng.uniform(0, 1)) for eid in ids}
        theta = float(rng.uniform(0, 1))
        squash = lambda c: c / (1.0 + c)  # strictly increasing on [0, 1]
        before = decide_identity(confs, g.entries(), theta)
        after = decide_identity({k: squash(v) for k, v in confs.items()},
                                g.entries(), squash(theta))
        assert before == after


def test_gallery_persistence_roundtrip_bit_exact(tmp_path):
    path = tmp_path / "gallery.json"
    g = Gallery(path=path)
    g.enroll(face_image(seed=9), "ada")
    g.enroll(face_image(seed=10), "bo")
    reloaded = Gallery(path=path)
    assert len(reloaded) == 2
    for orig, back in zip(g.entries(), reloaded.entries()):
        assert orig.entry_id == back.entry_id
        assert orig.label == back.label
        assert orig.enrolled_at == back.enrolled_at
        assert np.array_equal(orig.embedding.vector, back.embedding.vector)


def test_concurrent_queries_see_whole_entries():
    g = Gallery()
    g.enroll(face_image(seed=60), "seed")
    probe = face_image(seed=61)
    stop = threading.Event()
    bad = []

    def query_loop():
        while not stop.is_set():
            confs = g.query(probe)
            if any(not (0.0 <= c <= 1.0) or math.isnan(c) for c in confs.values()):
                bad.append(confs)

    t = threading.Thread(target=query_loop)
    t.start()
    for i in range(30):
        g.enroll(face_image(seed=70 + i), f"p{i}")
    stop.set()
    t.join()
    assert not bad
    assert len(g) == 31


# ---------------------------------------------------------------- image I/O

def test_pgm_roundtrip():
    img = face_image(seed=11)
    back = Image.from_pgm(img.to_pgm())
    np.testing.assert_array_equal(back.pixels, img.pixels)


def test_capture_rejects_above_native():
    big = Image.from_array(np.zeros((961, 1281), dtype=np.uint8))
    with pytest.warns(UserWarning):
        with pytest.raises(ValueError):
            validate_capture(big)
    ok = Image.from_array(np.zeros((480, 640), dtype=np.uint8))
    assert validate_capture(ok) is ok


# ------------------------------------------------------------------ service

@pytest.fixture
def service(tmp_path):
    gallery = Gallery(path=tmp_path / "gallery.json")
    svc = FaceService(gallery).start()
    yield svc
    svc.stop()


def url(svc, path):
    host, port = svc.address
    return f"http://{host}:{port}{path}"


def test_service_enroll_query_gallery(service):
    img = face_image(seed=90)
    r = requests.post(url(service, "/enroll?label=ada"), data=img.to_pgm(), timeout=5)
    assert r.status_code == 200
    entry_id = r.json()["entry_id"]

    r = requests.post(url(service, "/query"), data=img.to_pgm(), timeout=5)
    assert r.status_code == 200
    assert r.json()["confidences"][entry_id] == pytest.approx(1.0, abs=1e-9)

    r = requests.get(url(service, "/gallery"), timeout=5)
    entries = r.json()["entries"]
    assert [e["label"] for e in entries] == ["ada"]
    assert "embedding" not in entries[0]


def test_service_faceless_is_422(service):
    blank = dark_image().to_pgm()
    for path in ("/enroll?label=x", "/query"):
        r = requests.post(url(service, path), data=blank, timeout=5)
        assert r.status_code == 422
        assert r.json() == {"error": "no_face"}


def test_service_validates_input(service):
    r = requests.post(url(service, "/enroll"), data=face_image().to_pgm(), timeout=5)
    assert r.status_code == 400
    r = requests.post(url(service, "/query"), data=b"garbage", timeout=5)
    assert r.status_code == 400


def test_service_persists_gallery(service, tmp_path):
    img = face_image(seed=91)
    requests.post(url(service, "/enroll?label=zoe"), data=img.to_pgm(), timeout=5)
    saved = json.loads((tmp_path / "gallery.json").read_text())
    assert saved[0]["label"] == "zoe"
    assert len(saved[0]["embedding"]) == 256
