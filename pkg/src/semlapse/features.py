"""Frame-feature data model and the JSON Lines feature-file format.

A feature file decouples the selection engine from pixel processing.  It is
UTF-8 JSON Lines: the first line is a meta object, then one object per frame::

    {"width": 1280, "height": 720, "fps": 30.0, "frame_count": 3}
    {"index": 0, "detections": [{"x": 10.0, "y": 20.0, "w": 50.0, "h": 60.0,
     "confidence": 80.0}], "foe": [640.0, 360.0], "flow_mag": 5.2,
     "histogram": [0.01, ...]}
    ...

Per-transition quantities (``foe``, ``flow_mag``) are attached to the source
frame of each consecutive-frame transition; the final frame carries ``null``.
Histograms are three concatenated per-channel histograms whose total mass is
normalized to 1 on load (the only silent repair the loader performs).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

HIST_CHANNELS = 3


class FeatureFormatError(ValueError):
    """Raised when a feature file cannot be parsed or violates an invariant."""


@dataclass
class Detection:
    """One region of interest: pixel bbox plus detector confidence."""

    x: float
    y: float
    w: float
    h: float
    confidence: float

    @property
    def center(self) -> tuple[float, float]:
        return (self.x + self.w / 2.0, self.y + self.h / 2.0)

    @property
    def area(self) -> float:
        return self.w * self.h

    @property
    def diagonal(self) -> float:
        return math.hypot(self.w, self.h)


@dataclass
class FrameRecord:
    """Features of a single frame.

    ``foe`` and ``flow_mag`` describe the transition from this frame to the
    next one and are ``None`` when that transition was not measured (always
    for the last frame of a video).
    """

    index: int
    detections: list[Detection] = field(default_factory=list)
    foe: tuple[float, float] | None = None
    flow_mag: float | None = None
    histogram: np.ndarray = field(default_factory=lambda: np.zeros(0))


@dataclass
class VideoMeta:
    width: int
    height: int
    fps: float
    frame_count: int

    @property
    def center(self) -> tuple[float, float]:
        return (self.width / 2.0, self.height / 2.0)

    @property
    def diagonal(self) -> float:
        return math.hypot(self.width, self.height)


def _fail(msg: str) -> None:
    raise FeatureFormatError(msg)


def _check_meta(meta: VideoMeta) -> None:
    if not (isinstance(meta.width, int) and meta.width > 0):
        _fail("meta: width must be a positive integer")
    if not (isinstance(meta.height, int) and meta.height > 0):
        _fail("meta: height must be a positive integer")
    if not (math.isfinite(meta.fps) and meta.fps > 0):
        _fail("meta: fps must be positive and finite")
    if not (isinstance(meta.frame_count, int) and meta.frame_count > 0):
        _fail("frame_count must be positive")


def _check_detection(det: Detection, meta: VideoMeta, frame: int, k: int) -> None:
    where = f"frame {frame}: detection {k}"
    for name in ("x", "y", "w", "h", "confidence"):
        v = getattr(det, name)
        if not (isinstance(v, (int, float)) and math.isfinite(v)):
            _fail(f"{where}: field {name} must be a finite number")
    if det.w <= 0 or det.h <= 0:
        _fail(f"{where}: field w/h must be positive")
    if det.x < 0 or det.y < 0 or det.x + det.w > meta.width or det.y + det.h > meta.height:
        _fail(f"{where}: field bbox lies outside frame bounds")


def _check_records(meta: VideoMeta, records: Sequence[FrameRecord]) -> None:
    """Validate every type invariant except histogram mass (handled by caller)."""
    if len(records) != meta.frame_count:
        _fail(f"frame_count is {meta.frame_count} but file has {len(records)} frames")
    hist_len: int | None = None
    for pos, rec in enumerate(records):
        if not isinstance(rec.index, int):
            _fail(f"frame at position {pos}: field index must be an integer")
        if rec.index != pos:
            _fail(f"non-contiguous index at frame {rec.index} (expected {pos})")
        for k, det in enumerate(rec.detections):
            _check_detection(det, meta, rec.index, k)
        if rec.foe is not None:
            fx, fy = rec.foe
            if not (math.isfinite(fx) and math.isfinite(fy)):
                _fail(f"frame {rec.index}: field foe must be finite")
        if rec.flow_mag is not None:
            if not (
                isinstance(rec.flow_mag, (int, float))
                and math.isfinite(rec.flow_mag)
                and rec.flow_mag >= 0
            ):
                _fail(f"frame {rec.index}: field flow_mag must be finite and >= 0")
        h = np.asarray(rec.histogram, dtype=float)
        if h.ndim != 1 or h.size == 0:
            _fail(f"frame {rec.index}: field histogram must be a non-empty vector")
        if h.size % HIST_CHANNELS != 0:
            _fail(
                f"frame {rec.index}: field histogram length {h.size} is not "
                f"divisible by {HIST_CHANNELS} channels"
            )
        if hist_len is None:
            hist_len = h.size
        elif h.size != hist_len:
            _fail(
                f"frame {rec.index}: field histogram length {h.size} differs "
                f"from {hist_len} used earlier in the file"
            )
        if not np.all(np.isfinite(h)):
            _fail(f"frame {rec.index}: field histogram must be finite")
        if np.any(h < 0):
            _fail(f"frame {rec.index}: field histogram must be non-negative")
        if float(h.sum()) <= 0.0:
            _fail(f"frame {rec.index}: field histogram has zero total mass")


def _normalized(hist: np.ndarray) -> np.ndarray:
    h = np.asarray(hist, dtype=float)
    return h / float(h.sum())


def _parse_detection(obj: dict, lineno: int, k: int) -> Detection:
    try:
        return Detection(
            x=obj["x"], y=obj["y"], w=obj["w"], h=obj["h"], confidence=obj["confidence"]
        )
    except (KeyError, TypeError) as e:
        _fail(f"parse error at line {lineno}: detection {k}: {e}")
    raise AssertionError("unreachable")


def load_features(path: str | Path) -> tuple[VideoMeta, list[FrameRecord]]:
    """Load and validate a feature file.

    Histograms are renormalized to unit total mass; everything else must
    already satisfy the type invariants or a :class:`FeatureFormatError`
    naming the frame index and field is raised.  Parse errors carry the
    1-based line number.
    """
    path = Path(path)
    with path.open("r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or not lines[0].strip():
        _fail("parse error at line 1: missing meta line")

    def parsed(lineno: int) -> dict:
        try:
            obj = json.loads(lines[lineno - 1])
        except json.JSONDecodeError as e:
            _fail(f"parse error at line {lineno}: {e.msg}")
        if not isinstance(obj, dict):
            _fail(f"parse error at line {lineno}: expected a JSON object")
        return obj

    mobj = parsed(1)
    try:
        meta = VideoMeta(
            width=mobj["width"],
            height=mobj["height"],
            fps=mobj["fps"],
            frame_count=mobj["frame_count"],
        )
    except KeyError as e:
        _fail(f"parse error at line 1: meta is missing key {e}")
    _check_meta(meta)

    body = [ln for ln in lines[1:] if ln.strip()]
    records: list[FrameRecord] = []
    for n, _ in enumerate(body):
        lineno = n + 2
        obj = parsed(lineno)
        try:
            idx = obj["index"]
            hist = obj["histogram"]
        except KeyError as e:
            _fail(f"parse error at line {lineno}: frame is missing key {e}")
        dets = [
            _parse_detection(d, lineno, k) for k, d in enumerate(obj.get("detections", []))
        ]
        foe_raw = obj.get("foe")
        if foe_raw is not None:
            if not (
                isinstance(foe_raw, list)
                and len(foe_raw) == 2
                and all(isinstance(v, (int, float)) for v in foe_raw)
            ):
                _fail(f"parse error at line {lineno}: foe must be [x, y] or null")
            foe = (float(foe_raw[0]), float(foe_raw[1]))
        else:
            foe = None
        try:
            hist_arr = np.asarray(hist, dtype=float)
        except (TypeError, ValueError):
            _fail(f"parse error at line {lineno}: histogram must be a list of numbers")
        records.append(
            FrameRecord(
                index=idx,
                detections=dets,
                foe=foe,
                flow_mag=obj.get("flow_mag"),
                histogram=hist_arr,
            )
        )

    _check_records(meta, records)
    for rec in records:
        rec.histogram = _normalized(rec.histogram)
    return meta, records


def _det_to_json(det: Detection) -> dict:
    return {"x": det.x, "y": det.y, "w": det.w, "h": det.h, "confidence": det.confidence}


def write_features(meta: VideoMeta, records: Sequence[FrameRecord], path: str | Path) -> None:
    """Write a feature file; ``load_features`` reproduces the input.

    Records must satisfy the type invariants (histogram mass within 1e-6 of
    1).  Histograms are written in exactly-normalized canonical form so the
    write/load round trip is the identity up to float round-off.  Output is
    byte-stable: identical inputs always produce identical bytes.
    """
    _check_meta(meta)
    _check_records(meta, records)
    for rec in records:
        total = float(np.asarray(rec.histogram, dtype=float).sum())
        if abs(total - 1.0) > 1e-6:
            _fail(f"frame {rec.index}: field histogram sums to {total!r}, not 1")

    def dumps(obj: dict) -> str:
        return json.dumps(obj, sort_keys=True, separators=(",", ":"))

    out = [
        dumps(
            {
                "width": meta.width,
                "height": meta.height,
                "fps": meta.fps,
                "frame_count": meta.frame_count,
            }
        )
    ]
    for rec in records:
        out.append(
            dumps(
                {
                    "index": rec.index,
                    "detections": [_det_to_json(d) for d in rec.detections],
                    "foe": list(rec.foe) if rec.foe is not None else None,
                    "flow_mag": rec.flow_mag,
                    "histogram": _normalized(rec.histogram).tolist(),
                }
            )
        )
    Path(path).write_text("\n".join(out) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# Synthetic scenario generator


@dataclass
class SynthScenario:
    """Parameters for a synthetic feature-file scenario.

    ``bursts`` are half-open frame intervals that receive one prominent
    centered detection per frame (plus an occasional secondary one);
    ``burst_dropout`` leaves that fraction of burst frames empty, giving the
    score signal gaps a good selector should route around.  The optional
    background knobs add low-score clutter that exercises the confidence
    filter and gives the score signal realistic small peaks:

    * ``bg_cluster_rate``: expected per-frame probability of starting a short
      cluster of persistent mid-confidence detections (small bbox, held
      position), which survive persistence filtering but score low;
    * ``noise_rate``: per-frame probability of an isolated detection below
      the reject threshold;
    * ``transient_rate``: per-frame probability of an isolated mid-confidence
      detection, which persistence filtering removes.
    """

    frame_count: int = 1000
    width: int = 1280
    height: int = 720
    fps: float = 30.0
    bursts: tuple[tuple[int, int], ...] = ()
    burst_confidence: tuple[float, float] = (60.0, 120.0)
    burst_size_frac: tuple[float, float] = (0.15, 0.35)
    burst_dropout: float = 0.0
    center_jitter_frac: float = 0.15
    second_face_prob: float = 0.15
    bg_cluster_rate: float = 0.0
    noise_rate: float = 0.0
    transient_rate: float = 0.0
    foe_noise: float = 25.0
    flow_base: float = 6.0
    flow_noise: float = 1.5
    hist_bins: int = 32
    hist_drift: float = 0.02
    seed: int = 0

    def validate(self) -> None:
        if self.frame_count < 1:
            raise ValueError("frame_count must be >= 1")
        if self.width < 1 or self.height < 1 or self.fps <= 0:
            raise ValueError("width, height and fps must be positive")
        prev_end = 0
        for start, end in self.bursts:
            if not (0 <= start < end <= self.frame_count):
                raise ValueError(f"burst [{start}, {end}) outside [0, {self.frame_count})")
            if start < prev_end:
                raise ValueError("bursts must be sorted and non-overlapping")
            prev_end = end
        if self.foe_noise < 0 or self.flow_noise < 0 or self.flow_base < 0:
            raise ValueError("noise levels must be non-negative")
        for rate in (self.bg_cluster_rate, self.noise_rate, self.transient_rate,
                     self.burst_dropout):
            if not 0.0 <= rate <= 1.0:
                raise ValueError("rates must lie in [0, 1]")
        if self.hist_bins < 2:
            raise ValueError("hist_bins must be >= 2")


def _bounded_bbox(cx: float, cy: float, w: float, h: float, meta: VideoMeta) -> Detection | None:
    """Center a w-by-h box on (cx, cy), shifted to stay inside the frame."""
    if w > meta.width or h > meta.height:
        return None
    x = min(max(cx - w / 2.0, 0.0), meta.width - w)
    y = min(max(cy - h / 2.0, 0.0), meta.height - h)
    return Detection(x=x, y=y, w=w, h=h, confidence=0.0)


def synth_features(scenario: SynthScenario) -> tuple[VideoMeta, list[FrameRecord]]:
    """Generate a deterministic synthetic feature set for the scenario."""
    scenario.validate()
    scn = scenario
    rng = np.random.default_rng(scn.seed)
    meta = VideoMeta(
        width=scn.width, height=scn.height, fps=scn.fps, frame_count=scn.frame_count
    )
    n = scn.frame_count
    cx0, cy0 = meta.center
    base_dim = min(scn.width, scn.height)

    in_burst = np.zeros(n, dtype=bool)
    for start, end in scn.bursts:
        in_burst[start:end] = True

    detections: list[list[Detection]] = [[] for _ in range(n)]

    def face(conf_lo: float, conf_hi: float, size_lo: float, size_hi: float,
             cx: float, cy: float) -> Detection | None:
        size = rng.uniform(size_lo, size_hi) * base_dim
        det = _bounded_bbox(cx, cy, size, min(1.3 * size, meta.height), meta)
        if det is not None:
            det.confidence = rng.uniform(conf_lo, conf_hi)
        return det

    jx = scn.center_jitter_frac * scn.width
    jy = scn.center_jitter_frac * scn.height
    for i in range(n):
        if in_burst[i]:
            if scn.burst_dropout > 0 and rng.random() < scn.burst_dropout:
                continue
            det = face(*scn.burst_confidence, *scn.burst_size_frac,
                       cx0 + rng.uniform(-jx, jx), cy0 + rng.uniform(-jy, jy))
            if det is not None:
                detections[i].append(det)
            if rng.random() < scn.second_face_prob:
                det = face(scn.burst_confidence[0], scn.burst_confidence[1],
                           0.08, 0.15,
                           rng.uniform(0.2, 0.8) * scn.width,
                           rng.uniform(0.2, 0.8) * scn.height)
                if det is not None:
                    detections[i].append(det)

    # Background clusters: short runs of small mid-confidence detections at a
    # held position, so the persistence rule keeps them.
    i = 0
    while i < n:
        if scn.bg_cluster_rate > 0 and rng.random() < scn.bg_cluster_rate:
            length = int(rng.integers(12, 31))
            ccx = rng.uniform(0.2, 0.8) * scn.width
            ccy = rng.uniform(0.2, 0.8) * scn.height
            size_frac = rng.uniform(0.03, 0.08)
            for j in range(i, min(i + length, n)):
                det = face(15.0, 50.0, size_frac, size_frac,
                           ccx + rng.uniform(-2, 2), ccy + rng.uniform(-2, 2))
                if det is not None:
                    detections[j].append(det)
            i += length
        else:
            i += 1

    for i in range(n):
        if scn.noise_rate > 0 and rng.random() < scn.noise_rate:
            det = face(0.5, 9.5, 0.02, 0.10,
                       rng.uniform(0, scn.width), rng.uniform(0, scn.height))
            if det is not None:
                detections[i].append(det)
        if scn.transient_rate > 0 and rng.random() < scn.transient_rate:
            det = face(12.0, 55.0, 0.05, 0.15,
                       rng.uniform(0, scn.width), rng.uniform(0, scn.height))
            if det is not None:
                detections[i].append(det)

    # Appearance: per channel, a small gaussian bump drifting across the bins
    # over a constant floor; each channel carries 1/3 of the unit mass.
    bins = scn.hist_bins
    bin_idx = np.arange(bins, dtype=float)
    chan_base = rng.uniform(0, bins, size=HIST_CHANNELS)

    def histogram(i: int) -> np.ndarray:
        chans = []
        for c in range(HIST_CHANNELS):
            mu = (chan_base[c] + scn.hist_drift * i) % bins
            bump = np.exp(-0.5 * ((bin_idx - mu) / 2.5) ** 2)
            chan = bump + 0.05
            chans.append(chan / (chan.sum() * HIST_CHANNELS))
        return np.concatenate(chans)

    records = []
    for i in range(n):
        last = i == n - 1
        if last:
            foe = None
            flow = None
        else:
            noise = rng.normal(0.0, scn.foe_noise, size=2) if scn.foe_noise > 0 else (0.0, 0.0)
            foe = (cx0 + float(noise[0]), cy0 + float(noise[1]))
            flow = max(0.0, float(rng.normal(scn.flow_base, scn.flow_noise)))
        records.append(
            FrameRecord(
                index=i,
                detections=detections[i],
                foe=foe,
                flow_mag=flow,
                histogram=histogram(i),
            )
        )
    return meta, records


def plan_bursts(
    rng: np.random.Generator,
    frame_count: int,
    coverage: tuple[float, float] = (0.2, 0.4),
    burst_len: tuple[int, int] = (120, 400),
    min_gap: int = 60,
) -> tuple[tuple[int, int], ...]:
    """Randomly place non-overlapping bursts hitting a drawn coverage target.

    Burst lengths are drawn from ``burst_len`` until the target is reached,
    the last one is trimmed to land on it exactly (folded into its
    predecessor when the trim would leave a stub), and the leftover frames
    are split into gaps of at least ``min_gap`` with random extra padding.
    """
    if frame_count < 2 * min_gap + 2:
        raise ValueError("frame_count too small to place bursts")
    target = int(round(rng.uniform(*coverage) * frame_count))
    target = max(1, target)
    lens: list[int] = []
    while sum(lens) < target:
        lens.append(int(rng.integers(burst_len[0], burst_len[1] + 1)))
    excess = sum(lens) - target
    if excess:
        lens[-1] -= excess
        if lens[-1] < burst_len[0]:
            stub = lens.pop()
            if lens:
                lens[-1] += stub
            else:
                lens = [stub]
    k = len(lens)
    gap_budget = frame_count - sum(lens)
    gap = min(min_gap, gap_budget // (k + 1))
    slack = gap_budget - gap * (k + 1)
    weights = rng.random(k + 1)
    extras = np.floor(weights / weights.sum() * slack).astype(int)
    bursts = []
    pos = gap + int(extras[0])
    for i, length in enumerate(lens):
        bursts.append((pos, pos + length))
        pos += length + gap + int(extras[i + 1])
    return tuple(bursts)


def benchmark_scenario(seed: int, frame_count: int = 5000, width: int = 1280,
                       height: int = 720, fps: float = 30.0) -> SynthScenario:
    """Standard seeded scenario for comparing selectors.

    Bursts cover 20 to 40 percent of the frames with one quarter of burst
    frames left empty, small off-center faces with a wide confidence and
    size spread (so per-frame scores vary a lot inside a burst), plus light
    background clutter, FOE noise and flow noise.
    """
    rng = np.random.default_rng(seed)
    scale = frame_count / 5000
    burst_len = (max(20, int(120 * scale)), max(40, int(400 * scale)))
    min_gap = max(10, int(60 * scale))
    bursts = plan_bursts(rng, frame_count, burst_len=burst_len, min_gap=min_gap)
    return SynthScenario(
        frame_count=frame_count,
        width=width,
        height=height,
        fps=fps,
        bursts=bursts,
        burst_confidence=(60.0, 120.0),
        burst_size_frac=(0.08, 0.20),
        burst_dropout=0.25,
        center_jitter_frac=0.15,
        second_face_prob=0.10,
        bg_cluster_rate=0.002,
        noise_rate=0.01,
        transient_rate=0.005,
        foe_noise=25.0,
        flow_base=6.0,
        flow_noise=2.0,
        hist_bins=32,
        hist_drift=0.02,
        seed=seed + 10007,
    )


__all__ = [
    "Detection",
    "FrameRecord",
    "VideoMeta",
    "FeatureFormatError",
    "SynthScenario",
    "load_features",
    "write_features",
    "synth_features",
    "plan_bursts",
    "benchmark_scenario",
    "HIST_CHANNELS",
]
