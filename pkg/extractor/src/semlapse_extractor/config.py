"""Extraction settings."""

from __future__ import annotations

from dataclasses import dataclass

DETECTORS = ("blob", "haar")
FLOW_ESTIMATORS = ("farneback",)


@dataclass
class ExtractionConfig:
    """Knobs for turning a video into a feature file.

    ``confidence_scale`` multiplies the detector's raw quality (roughly
    [0, 10]) so confidences land on the 0-120 scale the selection engine's
    default thresholds (reject < 10, accept >= 60) were chosen for.  ``haar``
    needs a cascade XML; ``blob`` is self-contained.  ``stride`` keeps every
    n-th frame and divides the reported fps accordingly.
    """

    detector: str = "blob"
    confidence_scale: float = 12.0
    cascade_path: str | None = None
    flow: str = "farneback"
    hist_bins: int = 32
    stride: int = 1

    def validate(self) -> None:
        if self.detector not in DETECTORS:
            raise ValueError(f"unknown detector {self.detector!r}; choose from {DETECTORS}")
        if self.flow not in FLOW_ESTIMATORS:
            raise ValueError(f"unknown flow estimator {self.flow!r}")
        if not self.confidence_scale > 0:
            raise ValueError("confidence_scale must be positive")
        if self.hist_bins < 2:
            raise ValueError("hist_bins must be at least 2")
        if self.stride < 1:
            raise ValueError("stride must be at least 1")
