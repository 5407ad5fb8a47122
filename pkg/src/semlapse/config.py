"""Run-level configuration shared by the CLI and the pipeline helpers.

A RunConfig collects every tunable across the stages.  Fields left at None
are derived from the video at run time: the spatial sigma defaults to half
the larger frame dimension, the temporal smoothing sigma to one second of
frames, and the minimum segment length to two output frames' worth of
input.  Precedence when assembling a config: built-in defaults, then the
config file, then command-line flags.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, fields
from pathlib import Path

from .features import VideoMeta
from .semantic import ScoreParams
from .skipgraph import GraphParams
from .speedup import SpeedupConfig


@dataclass
class RunConfig:
    # scoring / filtering
    sigma: float | None = None
    theta: float = 10.0
    zeta: float = 60.0
    persistence_window: int = 15
    persistence_min_hits: int = 5
    normalize_area: bool = False
    # segmentation
    kernel_sigma: float | None = None
    min_segment_len: int | None = None
    # speed-up allocation
    speedup: int = 10
    lambda1: float = 40.0
    lambda2: float = 8.0
    max_speedup: int = 100
    # graph stage
    tau_max: int = 100
    alpha: float = 1.0
    beta: float = 1.0
    gamma: float = 1.0
    eta: float = 1.0
    epsilon: float = 1.0
    # synthetic scenarios
    seed: int = 0

    def resolved_sigma(self, meta: VideoMeta) -> float:
        if self.sigma is not None:
            return self.sigma
        return max(meta.width / 2.0, meta.height / 2.0)

    def resolved_kernel_sigma(self, meta: VideoMeta) -> float:
        if self.kernel_sigma is not None:
            return self.kernel_sigma
        return meta.fps

    def resolved_min_segment_len(self) -> int:
        if self.min_segment_len is not None:
            return self.min_segment_len
        return 2 * self.speedup

    def score_params(self, meta: VideoMeta) -> ScoreParams:
        return ScoreParams(
            sigma=self.resolved_sigma(meta),
            theta=self.theta,
            zeta=self.zeta,
            persistence_window=self.persistence_window,
            persistence_min_hits=self.persistence_min_hits,
        )

    def speedup_config(self) -> SpeedupConfig:
        return SpeedupConfig(
            F_d=self.speedup,
            lambda1=self.lambda1,
            lambda2=self.lambda2,
            max_speedup=self.max_speedup,
        )

    def graph_params(self) -> GraphParams:
        return GraphParams(
            tau_max=self.tau_max,
            alpha=self.alpha,
            beta=self.beta,
            gamma=self.gamma,
            eta=self.eta,
            epsilon=self.epsilon,
            F=self.speedup,
        )

    def validate(self) -> None:
        """Fail fast on bad values before any stage runs."""
        if self.sigma is not None and not self.sigma > 0:
            raise ValueError("sigma must be positive")
        if self.kernel_sigma is not None and not self.kernel_sigma > 0:
            raise ValueError("kernel_sigma must be positive")
        if self.min_segment_len is not None and self.min_segment_len < 1:
            raise ValueError("min_segment_len must be >= 1")
        for name in ("theta", "zeta", "lambda1", "lambda2",
                     "alpha", "beta", "gamma", "eta"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v >= 0):
                raise ValueError(f"{name} must be a finite non-negative number")
        if self.theta > self.zeta:
            raise ValueError("theta must not exceed zeta")
        # delegate the cross-field checks to the stage dataclasses
        self.speedup_config()
        self.graph_params()
        if self.persistence_window < self.persistence_min_hits or self.persistence_min_hits < 1:
            raise ValueError("need persistence_window >= persistence_min_hits >= 1")


_FIELD_NAMES = {f.name for f in fields(RunConfig)}
_INT_FIELDS = {"persistence_window", "persistence_min_hits", "min_segment_len",
               "speedup", "max_speedup", "tau_max", "seed"}


def load_config_file(path: str | Path) -> dict:
    """Read a JSON config file and check it only names known fields."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValueError(f"config file {path}: invalid JSON ({exc})") from None
    if not isinstance(data, dict):
        raise ValueError(f"config file {path}: top level must be an object")
    unknown = sorted(set(data) - _FIELD_NAMES)
    if unknown:
        raise ValueError(f"config file {path}: unknown fields: {', '.join(unknown)}")
    return data


def build_config(file_values: dict | None = None, flag_values: dict | None = None) -> RunConfig:
    """Merge defaults, config-file values and flags (flags win)."""
    merged: dict = {}
    for source in (file_values or {}), (flag_values or {}):
        for key, value in source.items():
            if key not in _FIELD_NAMES:
                raise ValueError(f"unknown config field: {key}")
            if value is not None:
                merged[key] = value
    for key in _INT_FIELDS & set(merged):
        value = merged[key]
        if (
            isinstance(value, bool)
            or not isinstance(value, (int, float))
            or (isinstance(value, float) and not value.is_integer())
        ):
            raise ValueError(f"{key} must be an integer")
        if isinstance(value, float):
            merged[key] = int(value)
    cfg = RunConfig(**merged)
    cfg.validate()
    return cfg


__all__ = ["RunConfig", "load_config_file", "build_config"]
