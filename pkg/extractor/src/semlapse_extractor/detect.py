"""Face-like region detectors emitting per-detection confidences.

Two backends: ``blob`` finds skin-toned elliptical regions with classic
YCrCb color gating (no model files, works out of the box), ``haar`` wraps
an OpenCV cascade and converts its rejection-level weights to confidences.
Either way the output is bbox + confidence; thresholding stays downstream
so the selection engine remains the single filtering authority.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

try:
    import cv2
except ImportError:  # pragma: no cover - exercised only without OpenCV
    cv2 = None


def require_cv2() -> None:
    if cv2 is None:
        raise RuntimeError(
            "OpenCV is required but not installed; "
            "run: pip install opencv-python-headless"
        )


@dataclass(frozen=True)
class RegionDetection:
    x: float
    y: float
    w: float
    h: float
    confidence: float


# YCrCb skin gate (Chai & Ngan ranges); grays sit at Cr=128 and fall outside
_SKIN_LO = (0, 135, 85)
_SKIN_HI = (255, 180, 135)
_ELLIPSE_FILL = np.pi / 4.0


class BlobDetector:
    """Skin-tone connected components scored by shape and size.

    Raw quality in [0, 10]: how elliptical the region is (fill ratio vs an
    inscribed ellipse), how balanced its aspect is, and how large it is
    relative to the frame.  Deterministic: components are emitted in
    (x, y) order.
    """

    def __init__(self, confidence_scale: float, min_area: int = 64) -> None:
        require_cv2()
        self.confidence_scale = confidence_scale
        self.min_area = min_area
        self._kernel = cv2.getStructuringElement(cv2.MORPH_ELLIPSE, (3, 3))

    def detect(self, frame_bgr: np.ndarray) -> list[RegionDetection]:
        height, width = frame_bgr.shape[:2]
        ycrcb = cv2.cvtColor(frame_bgr, cv2.COLOR_BGR2YCrCb)
        mask = cv2.inRange(ycrcb, _SKIN_LO, _SKIN_HI)
        mask = cv2.morphologyEx(mask, cv2.MORPH_OPEN, self._kernel)
        n, _, stats, _ = cv2.connectedComponentsWithStats(mask, connectivity=8)
        out = []
        for label in range(1, n):
            x, y, w, h, area = (int(v) for v in stats[label])
            if area < self.min_area:
                continue
            fill = area / (w * h)
            shape_score = max(0.0, 1.0 - abs(fill - _ELLIPSE_FILL) / _ELLIPSE_FILL)
            aspect_score = min(w, h) / max(w, h)
            size_score = min(1.0, area / (0.02 * width * height))
            quality = 10.0 * (0.5 * shape_score + 0.3 * aspect_score + 0.2 * size_score)
            out.append(RegionDetection(
                x=float(x), y=float(y), w=float(w), h=float(h),
                confidence=quality * self.confidence_scale,
            ))
        out.sort(key=lambda d: (d.x, d.y))
        return out


class HaarDetector:
    """OpenCV cascade classifier with rejection-level weights as confidence."""

    def __init__(self, confidence_scale: float, cascade_path: str | None) -> None:
        require_cv2()
        path = cascade_path or self._bundled_cascade()
        if path is None or not Path(path).is_file():
            raise RuntimeError(
                "no face cascade available; install a cascade-bundling OpenCV "
                "(pip install opencv-python-headless) or pass "
                "--cascade /path/to/haarcascade_frontalface_default.xml"
            )
        self.cascade = cv2.CascadeClassifier(str(path))
        if self.cascade.empty():
            raise RuntimeError(f"cascade file {path} failed to load")
        self.confidence_scale = confidence_scale

    @staticmethod
    def _bundled_cascade() -> str | None:
        data = getattr(cv2, "data", None)
        if data is None:
            return None
        path = Path(data.haarcascades) / "haarcascade_frontalface_default.xml"
        return str(path) if path.is_file() else None

    def detect(self, frame_bgr: np.ndarray) -> list[RegionDetection]:
        gray = cv2.cvtColor(frame_bgr, cv2.COLOR_BGR2GRAY)
        boxes, _, weights = self.cascade.detectMultiScale3(
            gray, scaleFactor=1.1, minNeighbors=4, outputRejectLevels=True
        )
        out = [
            RegionDetection(
                x=float(x), y=float(y), w=float(w), h=float(h),
                confidence=float(weight) * self.confidence_scale,
            )
            for (x, y, w, h), weight in zip(boxes, np.ravel(weights))
        ]
        out.sort(key=lambda d: (d.x, d.y))
        return out


def make_detector(config) -> BlobDetector | HaarDetector:
    if config.detector == "blob":
        return BlobDetector(config.confidence_scale)
    return HaarDetector(config.confidence_scale, config.cascade_path)
