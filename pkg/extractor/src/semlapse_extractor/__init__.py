"""Feature extraction from video files for the semlapse selection engine."""

from .config import ExtractionConfig
from .detect import BlobDetector, HaarDetector, RegionDetection, make_detector
from .extract import (
    color_histogram,
    extract,
    iter_frames,
    pairwise_foe,
    write_feature_file,
    write_foe_csv,
)
from .flow import dense_flow, estimate_foe, mean_magnitude

__version__ = "0.1.0"

__all__ = [
    "ExtractionConfig",
    "BlobDetector",
    "HaarDetector",
    "RegionDetection",
    "make_detector",
    "color_histogram",
    "extract",
    "iter_frames",
    "pairwise_foe",
    "write_feature_file",
    "write_foe_csv",
    "dense_flow",
    "estimate_foe",
    "mean_magnitude",
    "__version__",
]
