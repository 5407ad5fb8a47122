"""End-to-end wiring: features -> profile -> plan -> selection -> report."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .config import RunConfig
from .features import FrameRecord, VideoMeta
from .metrics import SelectionReport
from .semantic import SemanticProfile, build_profile
from .skipgraph import select_frames
from .speedup import SpeedupPlan, plan_from_segments


@dataclass
class PipelineResult:
    profile: SemanticProfile
    plan: SpeedupPlan
    report: SelectionReport


def compute_profile(
    meta: VideoMeta, frames: Sequence[FrameRecord], cfg: RunConfig
) -> SemanticProfile:
    return build_profile(
        frames,
        meta,
        cfg.score_params(meta),
        kernel_sigma=cfg.resolved_kernel_sigma(meta),
        min_segment_len=cfg.resolved_min_segment_len(),
        normalize_area=cfg.normalize_area,
    )


def run_pipeline(
    meta: VideoMeta, frames: Sequence[FrameRecord], cfg: RunConfig
) -> PipelineResult:
    """Run every stage on already-loaded features."""
    cfg.validate()
    profile = compute_profile(meta, frames, cfg)
    plan = plan_from_segments(profile.segments, cfg.speedup_config())
    report = select_frames(profile, plan, frames, meta, cfg.graph_params())
    return PipelineResult(profile=profile, plan=plan, report=report)


__all__ = ["PipelineResult", "compute_profile", "run_pipeline"]
