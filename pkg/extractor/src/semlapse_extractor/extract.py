"""Video to feature file, and pairwise FOE for an existing selection.

The output is the selection engine's JSON Lines format: one meta line
(width, height, fps, frame_count), then one line per kept frame with
detections, the transition flow/FOE toward the next kept frame (null on
the last frame), and a normalized concatenated-channel color histogram.
All floats are emitted with full precision and keys sorted, so identical
inputs produce byte-identical files.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from .config import ExtractionConfig
from .detect import RegionDetection, make_detector, require_cv2
from .flow import dense_flow, estimate_foe, mean_magnitude

try:
    import cv2
except ImportError:  # pragma: no cover - exercised only without OpenCV
    cv2 = None

_FALLBACK_FPS = 30.0


def _open_video(path: str | Path):
    require_cv2()
    cap = cv2.VideoCapture(str(path))
    if not cap.isOpened():
        raise ValueError(f"cannot open video: {path}")
    return cap


def iter_frames(path: str | Path, stride: int = 1) -> Iterator[tuple[int, np.ndarray]]:
    """Yield (output_index, BGR frame) for every stride-th decoded frame."""
    cap = _open_video(path)
    try:
        decoded = 0
        kept = 0
        while True:
            ok, frame = cap.read()
            if not ok:
                return
            if decoded % stride == 0:
                yield kept, frame
                kept += 1
            decoded += 1
    finally:
        cap.release()


def video_fps(path: str | Path) -> float:
    cap = _open_video(path)
    try:
        fps = cap.get(cv2.CAP_PROP_FPS)
    finally:
        cap.release()
    return fps if fps > 0 else _FALLBACK_FPS


def color_histogram(frame_bgr: np.ndarray, bins: int) -> np.ndarray:
    """Concatenated per-channel (B, G, R) histogram, total mass 1."""
    chans = [
        cv2.calcHist([frame_bgr], [c], None, [bins], [0, 256]).ravel()
        for c in range(3)
    ]
    hist = np.concatenate(chans).astype(float)
    return hist / hist.sum()


def _det_json(det: RegionDetection) -> dict:
    return {"x": det.x, "y": det.y, "w": det.w, "h": det.h,
            "confidence": det.confidence}


def _dumps(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def extract(video_path: str | Path, config: ExtractionConfig) -> tuple[dict, list[dict]]:
    """Run detector, flow and histograms over a video.

    Returns (meta, frame_records) as plain dicts in the feature-file schema.
    Transition values on frame i describe the step to kept frame i+1; the
    FOE is null when the flow field is too weak to localize it (downstream
    treats that as the image center).
    """
    config.validate()
    detector = make_detector(config)
    meta: dict | None = None
    records: list[dict] = []
    prev_gray: np.ndarray | None = None

    for index, frame in iter_frames(video_path, config.stride):
        if meta is None:
            height, width = frame.shape[:2]
            meta = {"width": width, "height": height,
                    "fps": video_fps(video_path) / config.stride,
                    "frame_count": 0}
        gray = cv2.cvtColor(frame, cv2.COLOR_BGR2GRAY)
        if prev_gray is not None:
            flow = dense_flow(prev_gray, gray)
            foe = estimate_foe(flow)
            records[-1]["flow_mag"] = mean_magnitude(flow)
            records[-1]["foe"] = None if foe is None else [foe[0], foe[1]]
        records.append({
            "index": index,
            "detections": [_det_json(d) for d in detector.detect(frame)],
            "foe": None,
            "flow_mag": None,
            "histogram": color_histogram(frame, config.hist_bins).tolist(),
        })
        prev_gray = gray

    if meta is None:
        raise ValueError(f"video {video_path} contains no frames")
    meta["frame_count"] = len(records)
    return meta, records


def write_feature_file(meta: dict, records: list[dict], path: str | Path) -> None:
    lines = [_dumps(meta)]
    lines.extend(_dumps(rec) for rec in records)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def pairwise_foe(
    video_path: str | Path, indices: Sequence[int]
) -> list[tuple[float, float]]:
    """FOE between each consecutive pair of selected frames.

    Unlike extract(), degenerate flow maps to the explicit image center so
    each transition has concrete coordinates for the CSV.
    """
    idx = list(indices)
    if len(idx) < 2:
        raise ValueError("need at least 2 indices")
    for a, b in zip(idx, idx[1:]):
        if b <= a:
            raise ValueError("indices must be strictly increasing")
    if idx[0] < 0:
        raise ValueError("indices out of range: negative index")

    wanted = set(idx)
    grays: dict[int, np.ndarray] = {}
    total = 0
    for i, frame in iter_frames(video_path, stride=1):
        total = i + 1
        if i in wanted:
            grays[i] = cv2.cvtColor(frame, cv2.COLOR_BGR2GRAY)
    missing = [i for i in idx if i not in grays]
    if missing:
        raise ValueError(
            f"indices out of range: frame {missing[0]} of a {total}-frame video"
        )

    height, width = grays[idx[0]].shape[:2]
    center = (width / 2.0, height / 2.0)
    out = []
    for a, b in zip(idx, idx[1:]):
        foe = estimate_foe(dense_flow(grays[a], grays[b]))
        out.append(center if foe is None else foe)
    return out


def write_foe_csv(points: Sequence[tuple[float, float]], path: str | Path) -> None:
    lines = ["t,x,y"]
    lines.extend(f"{t},{x!r},{y!r}" for t, (x, y) in enumerate(points))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
