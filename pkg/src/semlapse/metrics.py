"""Evaluation metrics for a frame selection.

Three axes: how much semantic score the kept frames carry, how much the
focus of expansion jumps between output transitions (a stability proxy),
and how far the achieved speed-up lands from the requested one.  The two
percentage forms normalize against documented worst cases and are clamped
to [0, 100].
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .features import FrameRecord, VideoMeta


@dataclass
class SelectionReport:
    """Selection outcome plus its metric values.

    ``jitter_amount`` and ``jitter_improvement_pct`` are None when the
    selection has fewer than three frames (jitter needs two transitions).
    """

    indices: list[int]
    semantic_amount: float
    jitter_amount: float | None
    jitter_improvement_pct: float | None
    achieved_speedup: float
    speedup_deviation: float
    deviation_pct_of_worst: float

    def __post_init__(self) -> None:
        for x, y in zip(self.indices, self.indices[1:]):
            if y <= x:
                raise ValueError("indices must be strictly increasing")

    def to_dict(self) -> dict:
        return {
            "indices": list(self.indices),
            "semantic_amount": self.semantic_amount,
            "jitter_amount": self.jitter_amount,
            "jitter_improvement_pct": self.jitter_improvement_pct,
            "achieved_speedup": self.achieved_speedup,
            "speedup_deviation": self.speedup_deviation,
            "deviation_pct_of_worst": self.deviation_pct_of_worst,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":")) + "\n"

    def to_csv_row(self) -> str:
        """Header plus one row, for aggregating runs into comparison tables."""
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(
            ["n_selected", "semantic_amount", "jitter_amount",
             "jitter_improvement_pct", "achieved_speedup",
             "speedup_deviation", "deviation_pct_of_worst"]
        )
        fmt = lambda v: "" if v is None else repr(float(v))
        writer.writerow(
            [len(self.indices), fmt(self.semantic_amount), fmt(self.jitter_amount),
             fmt(self.jitter_improvement_pct), fmt(self.achieved_speedup),
             fmt(self.speedup_deviation), fmt(self.deviation_pct_of_worst)]
        )
        return buf.getvalue()


def semantic_amount(indices: Sequence[int], scores: Sequence[float] | np.ndarray) -> float:
    """Sum of the per-frame scores over the selected indices."""
    s = np.asarray(scores, dtype=float)
    total = 0.0
    for i in indices:
        total += float(s[i])
    return total


def _transition_foes(
    indices: Sequence[int], frames: Sequence[FrameRecord], meta: VideoMeta
) -> list[tuple[float, float]]:
    """One FOE per output transition: the mean of the per-frame FOEs over
    the skipped range [i_t, i_{t+1}); frames without an estimate count as
    the image center."""
    cx, cy = meta.center
    out = []
    for a, b in zip(indices, indices[1:]):
        sx = sy = 0.0
        for t in range(a, b):
            foe = frames[t].foe
            if foe is None:
                foe = (cx, cy)
            sx += foe[0]
            sy += foe[1]
        n = b - a
        out.append((sx / n, sy / n))
    return out


def jitter_amount(
    indices: Sequence[int], frames: Sequence[FrameRecord], meta: VideoMeta
) -> float:
    """Mean distance between successive transition FOE locations."""
    if len(indices) < 3:
        raise ValueError("jitter needs at least 3 selected frames (2 transitions)")
    foes = _transition_foes(indices, frames, meta)
    total = 0.0
    for (x0, y0), (x1, y1) in zip(foes, foes[1:]):
        total += math.hypot(x1 - x0, y1 - y0)
    return total / (len(foes) - 1)


def jitter_improvement(jitter: float, meta: VideoMeta) -> float:
    """100 at zero jitter, 0 when the FOE swings a full diagonal per step."""
    if jitter < 0:
        raise ValueError("jitter must be non-negative")
    pct = 100.0 * (1.0 - jitter / meta.diagonal)
    return min(100.0, max(0.0, pct))


def speedup_deviation(
    indices: Sequence[int], frame_count: int, F_d: int, tau_max: int
) -> tuple[float, float]:
    """(deviation, percent of worst case).

    Deviation is the absolute gap between the achieved speed-up
    frame_count / |selection| and F_d.  The worst case is |tau_max - F_d|;
    when that is zero (tau_max = F_d) the scale collapses and the percent
    is 100 for an exact match, else 0.
    """
    if not indices:
        raise ValueError("empty selection")
    dev = abs(frame_count / len(indices) - F_d)
    worst = abs(tau_max - F_d)
    if worst == 0:
        return dev, 100.0 if dev == 0 else 0.0
    pct = 100.0 * (1.0 - dev / worst)
    return dev, min(100.0, max(0.0, pct))


def build_report(
    indices: Sequence[int],
    scores: Sequence[float] | np.ndarray,
    frames: Sequence[FrameRecord],
    meta: VideoMeta,
    F_d: int,
    tau_max: int,
) -> SelectionReport:
    """Assemble the full metric report for a selection."""
    if not indices:
        raise ValueError("empty selection")
    idx = list(indices)
    if len(idx) >= 3:
        jit = jitter_amount(idx, frames, meta)
        jit_pct = jitter_improvement(jit, meta)
    else:
        jit = None
        jit_pct = None
    dev, dev_pct = speedup_deviation(idx, meta.frame_count, F_d, tau_max)
    return SelectionReport(
        indices=idx,
        semantic_amount=semantic_amount(idx, scores),
        jitter_amount=jit,
        jitter_improvement_pct=jit_pct,
        achieved_speedup=meta.frame_count / len(idx),
        speedup_deviation=dev,
        deviation_pct_of_worst=dev_pct,
    )


__all__ = [
    "SelectionReport",
    "semantic_amount",
    "jitter_amount",
    "jitter_improvement",
    "speedup_deviation",
    "build_report",
]
