"""Dense optical flow, its mean magnitude, and the focus of expansion.

The FOE is the point every flow vector points away from (or toward) under
camera translation.  Each pixel's constraint "the line through (x, y) with
direction (u, v) passes through the FOE" is one linear equation; the
least-squares intersection over a sampled grid gives the estimate.  Rows
scale with |flow|, so strong vectors are weighted up without an explicit
weight matrix.
"""

from __future__ import annotations

import numpy as np

from .detect import require_cv2

try:
    import cv2
except ImportError:  # pragma: no cover - exercised only without OpenCV
    cv2 = None

# below this median magnitude (px) the flow field carries no direction signal
MIN_FLOW = 0.05
_SAMPLE_STEP = 8
_MIN_SAMPLES = 50


def dense_flow(prev_gray: np.ndarray, gray: np.ndarray) -> np.ndarray:
    """Farneback flow from prev to next, shape (H, W, 2) of (u, v)."""
    require_cv2()
    return cv2.calcOpticalFlowFarneback(
        prev_gray, gray, None,
        pyr_scale=0.5, levels=3, winsize=15, iterations=3,
        poly_n=5, poly_sigma=1.2, flags=0,
    )


def mean_magnitude(flow: np.ndarray) -> float:
    return float(np.hypot(flow[..., 0], flow[..., 1]).mean())


def estimate_foe(flow: np.ndarray) -> tuple[float, float] | None:
    """Least-squares FOE of a flow field, or None when flow is degenerate.

    Pure translation puts the true FOE near infinity; estimates are clamped
    to [-W, 2W] x [-H, 2H] so downstream distances stay on the image scale
    while the offset's side is preserved.
    """
    height, width = flow.shape[:2]
    ys, xs = np.mgrid[0:height:_SAMPLE_STEP, 0:width:_SAMPLE_STEP]
    u = flow[ys, xs, 0].ravel()
    v = flow[ys, xs, 1].ravel()
    xs = xs.ravel().astype(float)
    ys = ys.ravel().astype(float)

    mag = np.hypot(u, v)
    keep = mag > MIN_FLOW
    if keep.sum() < _MIN_SAMPLES or np.median(mag) < MIN_FLOW:
        return None
    # (foe - p) x (u, v) = 0  ->  v*foe_x - u*foe_y = v*x - u*y
    A = np.stack([v[keep], -u[keep]], axis=1)
    b = v[keep] * xs[keep] - u[keep] * ys[keep]
    solution, _, rank, _ = np.linalg.lstsq(A, b, rcond=None)
    if rank < 2:
        return None
    fx = float(np.clip(solution[0], -width, 2 * width))
    fy = float(np.clip(solution[1], -height, 2 * height))
    return (fx, fy)
