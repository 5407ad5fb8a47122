"""Rendered test clips, shared across the extractor suite.

Every clip is synthesized deterministically and written once per session as
MJPG avi, the codec OpenCV builds bundle by default.  The face clip is
about 20 seconds long so the end-to-end test runs against a realistic
frame count.
"""

import numpy as np
import pytest

cv2 = pytest.importorskip("cv2")

pytest.importorskip("semlapse_extractor")

SIZE = (320, 240)
FPS = 30.0
FACE_BURST = (150, 450)
FACE_FRAMES = 600
SKIN_BGR = (120, 160, 210)


def _texture(seed):
    rng = np.random.default_rng(seed)
    plane = rng.integers(60, 200, size=(SIZE[1], SIZE[0])).astype(np.uint8)
    return cv2.GaussianBlur(plane, (5, 5), 0)


def _writer(path):
    w = cv2.VideoWriter(str(path), cv2.VideoWriter_fourcc(*"MJPG"), FPS, SIZE)
    assert w.isOpened()
    return w


def _gray3(plane):
    return cv2.merge([plane, plane, plane])


@pytest.fixture(scope="session")
def static_clip(tmp_path_factory):
    path = tmp_path_factory.mktemp("clips") / "static.avi"
    base = _texture(1)
    w = _writer(path)
    for _ in range(60):
        w.write(_gray3(base))
    w.release()
    return path


@pytest.fixture(scope="session")
def translating_clip(tmp_path_factory):
    path = tmp_path_factory.mktemp("clips") / "translating.avi"
    base = _texture(2)
    w = _writer(path)
    for i in range(40):
        w.write(_gray3(np.roll(base, 3 * i, axis=1)))
    w.release()
    return path


ZOOM_CENTER = (80.0, 120.0)


@pytest.fixture(scope="session")
def zoom_clip(tmp_path_factory):
    """Expanding scene; the focus of expansion sits left of center."""
    path = tmp_path_factory.mktemp("clips") / "zoom.avi"
    base = _gray3(_texture(3))
    w = _writer(path)
    qx, qy = ZOOM_CENTER
    for i in range(40):
        s = 1.01**i
        m = np.array([[s, 0.0, qx * (1 - s)], [0.0, s, qy * (1 - s)]])
        w.write(cv2.warpAffine(base, m, SIZE, flags=cv2.INTER_LINEAR,
                               borderMode=cv2.BORDER_REFLECT))
    w.release()
    return path


@pytest.fixture(scope="session")
def face_clip(tmp_path_factory):
    """Slow pan over texture with a skin-toned ellipse during the burst."""
    path = tmp_path_factory.mktemp("clips") / "face.avi"
    base = _texture(4)
    w = _writer(path)
    for i in range(FACE_FRAMES):
        frame = _gray3(np.roll(base, i, axis=1))
        if FACE_BURST[0] <= i < FACE_BURST[1]:
            cx = int(160 + 12 * np.sin(i / 17.0))
            cy = int(120 + 8 * np.cos(i / 23.0))
            cv2.ellipse(frame, (cx, cy), (22, 28), 0, 0, 360, SKIN_BGR, -1)
        w.write(frame)
    w.release()
    return path
