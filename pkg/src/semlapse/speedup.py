"""Constrained allocation of per-class speed-up rates.

Given the total lengths of the semantic and non-semantic parts and a desired
overall speed-up F_d, pick integer rates (F_s for semantic parts, F_ns for
the rest) that keep the overall rate close to F_d while favoring a lower
rate inside semantic parts.  The search space is the full integer grid
1 <= F_s <= F_d <= F_ns <= max_speedup, evaluated exhaustively.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .semantic import Segment


@dataclass
class SpeedupConfig:
    """Grid-search settings.

    ``lambda1`` penalizes the gap between the two rates, ``lambda2``
    penalizes large semantic rates.  The defaults are heuristic choices
    sized so neither penalty drowns the rate-deviation term on videos of
    around 10^4 frames; override them freely.
    """

    F_d: int = 10
    lambda1: float = 40.0
    lambda2: float = 8.0
    max_speedup: int = 100

    def __post_init__(self) -> None:
        if not isinstance(self.F_d, int) or not isinstance(self.max_speedup, int):
            raise ValueError("F_d and max_speedup must be integers")
        if not 1 <= self.F_d <= self.max_speedup:
            raise ValueError("need 1 <= F_d <= max_speedup")
        if self.lambda1 < 0 or self.lambda2 < 0:
            raise ValueError("lambda1 and lambda2 must be non-negative")


@dataclass
class SpeedupPlan:
    """Chosen rates plus the objective bookkeeping behind the choice."""

    F_s: int
    F_ns: int
    F_d: int
    objective: float
    D_value: float
    L_s: int
    L_ns: int

    def __post_init__(self) -> None:
        if not 1 <= self.F_s <= self.F_d <= self.F_ns:
            raise ValueError("plan violates F_s <= F_d <= F_ns")

    def rate_for(self, label: str) -> int:
        return self.F_s if label == "semantic" else self.F_ns


def deviation(F_ns: int, F_s: int, L_s: float, L_ns: float, F_d: int) -> float:
    """Absolute gap between desired and allocated output length.

    (L_s + L_ns) / F_d is the output frame budget; L_s/F_s + L_ns/F_ns is
    what the chosen rates would actually emit.
    """
    if F_s <= 0 or F_ns <= 0 or F_d <= 0:
        raise ValueError("speed-up rates must be positive")
    if L_s < 0 or L_ns < 0:
        raise ValueError("segment lengths must be non-negative")
    return abs((L_s + L_ns) / F_d - L_s / F_s - L_ns / F_ns)


def optimize_speedups(L_s: int, L_ns: int, cfg: SpeedupConfig) -> SpeedupPlan:
    """Exhaustive argmin of D + lambda1*|F_ns - F_s| + lambda2*|F_s|.

    Ties are broken deterministically: smaller D, then smaller F_s, then
    smaller F_ns.  The evaluation order of the float expressions matches a
    scalar left-to-right reading so results are bit-stable across runs.
    """
    if L_s < 0 or L_ns < 0:
        raise ValueError("segment lengths must be non-negative")
    if L_s + L_ns == 0:
        raise ValueError("video has no frames to allocate")

    fs = np.arange(1, cfg.F_d + 1, dtype=np.int64)
    fns = np.arange(cfg.F_d, cfg.max_speedup + 1, dtype=np.int64)
    FS, FNS = np.meshgrid(fs, fns, indexing="ij")
    FS = FS.ravel()
    FNS = FNS.ravel()

    target = (L_s + L_ns) / cfg.F_d
    D = np.abs(target - L_s / FS - L_ns / FNS)
    obj = D + cfg.lambda1 * np.abs(FNS - FS) + cfg.lambda2 * np.abs(FS)

    best = np.lexsort((FNS, FS, D, obj))[0]
    return SpeedupPlan(
        F_s=int(FS[best]),
        F_ns=int(FNS[best]),
        F_d=cfg.F_d,
        objective=float(obj[best]),
        D_value=float(D[best]),
        L_s=int(L_s),
        L_ns=int(L_ns),
    )


def segment_lengths(segments: list[Segment]) -> tuple[int, int]:
    """(semantic frames, non-semantic frames) totals."""
    L_s = sum(seg.length for seg in segments if seg.is_semantic)
    L_ns = sum(seg.length for seg in segments if not seg.is_semantic)
    return L_s, L_ns


def plan_from_segments(segments: list[Segment], cfg: SpeedupConfig) -> SpeedupPlan:
    """Allocate rates for a segmented video.

    With no semantic frames the grid search is pointless (F_s is never
    used); both rates collapse to the requested overall speed-up.
    """
    L_s, L_ns = segment_lengths(segments)
    if L_s == 0:
        d = deviation(cfg.F_d, cfg.F_d, L_s, L_ns, cfg.F_d)
        obj = d + cfg.lambda1 * abs(cfg.F_d - cfg.F_d) + cfg.lambda2 * abs(cfg.F_d)
        return SpeedupPlan(
            F_s=cfg.F_d, F_ns=cfg.F_d, F_d=cfg.F_d,
            objective=obj, D_value=d, L_s=L_s, L_ns=L_ns,
        )
    return optimize_speedups(L_s, L_ns, cfg)


def objective_surface_csv(L_s: int, L_ns: int, cfg: SpeedupConfig) -> str:
    """CSV of the feasible grid (F_s, F_ns, D, objective) for inspection."""
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["F_s", "F_ns", "D", "objective"])
    target = (L_s + L_ns) / cfg.F_d
    for F_s in range(1, cfg.F_d + 1):
        for F_ns in range(cfg.F_d, cfg.max_speedup + 1):
            d = abs(target - L_s / F_s - L_ns / F_ns)
            obj = d + cfg.lambda1 * abs(F_ns - F_s) + cfg.lambda2 * abs(F_s)
            writer.writerow([F_s, F_ns, repr(d), repr(obj)])
    return buf.getvalue()


__all__ = [
    "SpeedupConfig",
    "SpeedupPlan",
    "deviation",
    "optimize_speedups",
    "segment_lengths",
    "plan_from_segments",
    "objective_surface_csv",
]
