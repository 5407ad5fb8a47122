"""Per-frame semantic scoring and semantic/non-semantic segmentation.

A frame's score sums, over its detections, confidence times a centered 2-D
Gaussian weight at the detection center times the detection area.  Scores are
smoothed with a 1-D Gaussian, a threshold is derived from the smoothed
signal's peaks, and the video is split into maximal runs above/below that
threshold (short runs get absorbed by their neighbors).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .features import FrameRecord, VideoMeta


@dataclass
class ScoreParams:
    """Scoring and confidence-filtering parameters.

    ``sigma`` is the spatial Gaussian spread in pixels.  Detections scoring
    below ``theta`` are rejected outright, at or above ``zeta`` accepted
    outright; the mid band is kept only when supported by nearby frames
    (see :func:`filter_detections`).
    """

    sigma: float
    theta: float = 10.0
    zeta: float = 60.0
    persistence_window: int = 15
    persistence_min_hits: int = 5

    def __post_init__(self) -> None:
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        if self.theta > self.zeta:
            raise ValueError("theta must not exceed zeta")
        if not self.persistence_window >= self.persistence_min_hits >= 1:
            raise ValueError("need persistence_window >= persistence_min_hits >= 1")


@dataclass
class Segment:
    start: int  # inclusive
    end: int  # exclusive
    label: str  # "semantic" | "non_semantic"

    def __post_init__(self) -> None:
        if not self.start < self.end:
            raise ValueError(f"empty segment [{self.start}, {self.end})")
        if self.label not in ("semantic", "non_semantic"):
            raise ValueError(f"unknown segment label {self.label!r}")

    @property
    def length(self) -> int:
        return self.end - self.start

    @property
    def is_semantic(self) -> bool:
        return self.label == "semantic"


@dataclass
class SemanticProfile:
    raw_scores: np.ndarray
    smoothed_scores: np.ndarray
    threshold: float
    segments: list[Segment]

    def labels(self) -> list[str]:
        """Per-frame segment label."""
        out = [""] * len(self.raw_scores)
        for seg in self.segments:
            for i in range(seg.start, seg.end):
                out[i] = seg.label
        return out


def gaussian_weight(dx: float, dy: float, sigma: float) -> float:
    """Zero-mean isotropic 2-D Gaussian density at offset (dx, dy).

    The peak value is 1/(2*pi*sigma^2); no renormalization to 1 is applied,
    so scores are comparable across runs with the same sigma.
    """
    return math.exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma)) / (
        2.0 * math.pi * sigma * sigma
    )


def frame_score(
    frame: FrameRecord,
    meta: VideoMeta,
    params: ScoreParams,
    normalize_area: bool = False,
) -> float:
    """Semantic score of one frame: sum of confidence * gaussian * area.

    Detections are assumed to be confidence-filtered already.  With
    ``normalize_area`` the bbox area is divided by the frame area, removing
    the resolution dependence of raw pixel^2 areas.
    """
    cx0, cy0 = meta.center
    total = 0.0
    for det in frame.detections:
        cx, cy = det.center
        area = det.area
        if normalize_area:
            area /= meta.width * meta.height
        total += det.confidence * gaussian_weight(cx - cx0, cy - cy0, params.sigma) * area
    return total


def compute_scores(
    frames: Sequence[FrameRecord],
    meta: VideoMeta,
    params: ScoreParams,
    normalize_area: bool = False,
) -> np.ndarray:
    return np.array(
        [frame_score(f, meta, params, normalize_area) for f in frames], dtype=float
    )


def filter_detections(
    frames: Sequence[FrameRecord], params: ScoreParams
) -> list[FrameRecord]:
    """Apply the confidence filter, returning new frame records.

    Rules: confidence < theta drops the detection, >= zeta keeps it, and the
    mid band [theta, zeta) keeps a detection only when detections recur
    nearby in time: at least ``persistence_min_hits`` frames within the
    centered ``persistence_window`` contain some >= theta detection whose
    bbox center lies within one bbox diagonal of the candidate's center.
    The candidate's own frame counts as a hit.
    """
    n = len(frames)
    radius = params.persistence_window // 2

    def supported(i: int, cand) -> bool:
        cx, cy = cand.center
        gate = cand.diagonal
        hits = 0
        for j in range(max(0, i - radius), min(n, i + radius + 1)):
            for det in frames[j].detections:
                if det.confidence < params.theta:
                    continue
                dx, dy = det.center
                if math.hypot(dx - cx, dy - cy) <= gate:
                    hits += 1
                    break
        return hits >= params.persistence_min_hits

    out = []
    for i, frame in enumerate(frames):
        kept = []
        for det in frame.detections:
            if det.confidence < params.theta:
                continue
            if det.confidence >= params.zeta or supported(i, det):
                kept.append(det)
        out.append(
            FrameRecord(
                index=frame.index,
                detections=kept,
                foe=frame.foe,
                flow_mag=frame.flow_mag,
                histogram=frame.histogram,
            )
        )
    return out


def smooth_scores(raw: Sequence[float] | np.ndarray, kernel_sigma: float) -> np.ndarray:
    """Gaussian-smooth a score vector.

    The kernel is truncated at 3 sigma and renormalized at the edges by the
    in-range kernel mass, so a constant signal is a fixed point.
    """
    arr = np.asarray(raw, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("raw scores must be a non-empty vector")
    if not kernel_sigma > 0:
        raise ValueError("kernel_sigma must be positive")
    r = max(1, int(math.ceil(3.0 * kernel_sigma)))
    offsets = np.arange(-r, r + 1, dtype=float)
    kernel = np.exp(-(offsets**2) / (2.0 * kernel_sigma**2))
    # zero-pad by the kernel radius so every input length yields an output of
    # the same length (np.convolve's "same" mode would return the kernel
    # length for inputs shorter than the kernel)
    num = np.convolve(np.pad(arr, r), kernel, mode="valid")
    den = np.convolve(np.pad(np.ones_like(arr), r), kernel, mode="valid")
    return num / den


def segmentation_threshold(smoothed: Sequence[float] | np.ndarray) -> float:
    """Midpoint between the smallest and largest strict local maximum.

    Falls back to the midpoint of the signal's min and max when the signal
    has fewer than two strict interior peaks.
    """
    s = np.asarray(smoothed, dtype=float)
    if s.size < 3:
        raise ValueError("need at least 3 samples to derive a threshold")
    interior = (s[1:-1] > s[:-2]) & (s[1:-1] > s[2:])
    peaks = s[1:-1][interior]
    if peaks.size >= 2:
        return (float(peaks.min()) + float(peaks.max())) / 2.0
    return (float(s.min()) + float(s.max())) / 2.0


def _runs(mask: np.ndarray) -> list[list]:
    runs = []
    start = 0
    for i in range(1, len(mask) + 1):
        if i == len(mask) or mask[i] != mask[start]:
            runs.append([start, i, bool(mask[start])])
            start = i
    return runs


def _coalesce(runs: list[list]) -> list[list]:
    out = [runs[0]]
    for run in runs[1:]:
        if run[2] == out[-1][2]:
            out[-1][1] = run[1]
        else:
            out.append(run)
    return out


def segment_video(
    smoothed: Sequence[float] | np.ndarray,
    threshold: float,
    min_segment_len: int = 1,
) -> list[Segment]:
    """Split frames into alternating semantic/non-semantic segments.

    Frames with smoothed score strictly above the threshold are semantic.
    Runs shorter than ``min_segment_len`` are absorbed: repeatedly take the
    shortest such run (leftmost on ties) and merge it into the longer of its
    neighbors (the preceding one on ties), coalescing equal labels, until
    every remaining run is long enough or only one run is left.  Because
    runs alternate, merging flips the short run's label either way, so the
    neighbor choice never changes the resulting partition.
    """
    s = np.asarray(smoothed, dtype=float)
    if s.size == 0:
        return []
    if min_segment_len < 1:
        raise ValueError("min_segment_len must be >= 1")
    runs = _runs(s > threshold)

    while len(runs) > 1:
        short = min(
            (run for run in runs if run[1] - run[0] < min_segment_len),
            key=lambda run: (run[1] - run[0], run[0]),
            default=None,
        )
        if short is None:
            break
        k = runs.index(short)
        prev_len = runs[k - 1][1] - runs[k - 1][0] if k > 0 else -1
        next_len = runs[k + 1][1] - runs[k + 1][0] if k + 1 < len(runs) else -1
        neighbor = runs[k - 1] if prev_len >= next_len else runs[k + 1]
        short[2] = neighbor[2]
        runs = _coalesce(runs)

    return [
        Segment(start, end, "semantic" if flag else "non_semantic")
        for start, end, flag in runs
    ]


def build_profile(
    frames: Sequence[FrameRecord],
    meta: VideoMeta,
    params: ScoreParams,
    kernel_sigma: float,
    min_segment_len: int,
    normalize_area: bool = False,
) -> SemanticProfile:
    """Filter, score, smooth, threshold and segment in one pass."""
    filtered = filter_detections(frames, params)
    raw = compute_scores(filtered, meta, params, normalize_area)
    smoothed = smooth_scores(raw, kernel_sigma)
    threshold = segmentation_threshold(smoothed)
    segments = segment_video(smoothed, threshold, min_segment_len)
    return SemanticProfile(
        raw_scores=raw, smoothed_scores=smoothed, threshold=threshold, segments=segments
    )


def write_score_csv(path: str | Path, profile: SemanticProfile) -> None:
    """Dump (index, raw, smoothed, threshold, label) rows for plotting."""
    labels = profile.labels()
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "raw", "smoothed", "threshold", "label"])
        for i, (raw, smoothed) in enumerate(
            zip(profile.raw_scores, profile.smoothed_scores)
        ):
            writer.writerow([i, repr(float(raw)), repr(float(smoothed)),
                             repr(float(profile.threshold)), labels[i]])


__all__ = [
    "ScoreParams",
    "Segment",
    "SemanticProfile",
    "gaussian_weight",
    "frame_score",
    "compute_scores",
    "filter_detections",
    "smooth_scores",
    "segmentation_threshold",
    "segment_video",
    "build_profile",
    "write_score_csv",
]
