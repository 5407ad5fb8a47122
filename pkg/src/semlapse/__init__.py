"""Semantic fast-forward frame selection.

Turns per-frame features (detections, optical-flow summaries, color
histograms) into a sped-up frame selection that slows down where the
content matters: score frames, split the video into semantic and
non-semantic segments, allocate a speed-up rate per class, then pick each
segment's frames with a shortest path through a skip graph.
"""

from .baselines import naive_faces_sample, naive_sample
from .config import RunConfig, build_config, load_config_file
from .features import (
    Detection,
    FeatureFormatError,
    FrameRecord,
    SynthScenario,
    VideoMeta,
    benchmark_scenario,
    load_features,
    plan_bursts,
    synth_features,
    write_features,
)
from .metrics import (
    SelectionReport,
    build_report,
    jitter_amount,
    jitter_improvement,
    semantic_amount,
    speedup_deviation,
)
from .pipeline import PipelineResult, compute_profile, run_pipeline
from .semantic import (
    ScoreParams,
    Segment,
    SemanticProfile,
    build_profile,
    compute_scores,
    filter_detections,
    frame_score,
    segment_video,
    segmentation_threshold,
    smooth_scores,
)
from .skipgraph import (
    EdgeCosts,
    GraphParams,
    SegmentPath,
    SkipGraph,
    appearance_cost,
    balance_cost,
    build_graph,
    compute_target_flow,
    edge_costs,
    edge_weight,
    select_frames,
    semantic_cost,
    shortest_path,
    velocity_cost,
)
from .speedup import (
    SpeedupConfig,
    SpeedupPlan,
    deviation,
    optimize_speedups,
    plan_from_segments,
    segment_lengths,
)

__version__ = "0.1.0"

__all__ = [
    "Detection",
    "EdgeCosts",
    "FeatureFormatError",
    "FrameRecord",
    "GraphParams",
    "PipelineResult",
    "RunConfig",
    "ScoreParams",
    "Segment",
    "SegmentPath",
    "SelectionReport",
    "SemanticProfile",
    "SkipGraph",
    "SpeedupConfig",
    "SpeedupPlan",
    "SynthScenario",
    "VideoMeta",
    "appearance_cost",
    "balance_cost",
    "benchmark_scenario",
    "build_config",
    "build_graph",
    "build_profile",
    "build_report",
    "compute_profile",
    "compute_scores",
    "compute_target_flow",
    "deviation",
    "edge_costs",
    "edge_weight",
    "filter_detections",
    "frame_score",
    "jitter_amount",
    "jitter_improvement",
    "load_config_file",
    "load_features",
    "naive_faces_sample",
    "naive_sample",
    "optimize_speedups",
    "plan_bursts",
    "plan_from_segments",
    "run_pipeline",
    "segment_lengths",
    "segment_video",
    "segmentation_threshold",
    "select_frames",
    "semantic_amount",
    "semantic_cost",
    "shortest_path",
    "smooth_scores",
    "speedup_deviation",
    "synth_features",
    "velocity_cost",
    "write_features",
]
