"""Reference selectors the pipeline is compared against.

Both hit the requested speed-up by construction: one samples uniformly,
the other keeps the highest-scoring frames with no regard for spacing.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np


def naive_sample(frame_count: int, F_d: int) -> list[int]:
    """Every F_d-th frame starting at 0."""
    if frame_count < 1:
        raise ValueError("frame_count must be positive")
    if F_d < 1:
        raise ValueError("F_d must be >= 1")
    return list(range(0, frame_count, F_d))


def naive_faces_sample(scores: Sequence[float] | np.ndarray, F_d: int) -> list[int]:
    """The floor(n / F_d) highest-scoring frames, in temporal order.

    Score ties prefer the earlier frame.  This maximizes total selected
    score over all selections of that size, so it upper-bounds any
    selector's semantic amount at the same output length.
    """
    if F_d < 1:
        raise ValueError("F_d must be >= 1")
    s = np.asarray(scores, dtype=float)
    n = len(s)
    k = n // F_d
    if k == 0:
        return []
    # sort by (-score, index): stable argsort on -s gives exactly that
    order = np.argsort(-s, kind="stable")[:k]
    return sorted(int(i) for i in order)


__all__ = ["naive_sample", "naive_faces_sample"]
