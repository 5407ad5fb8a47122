"""Per-segment skip graphs and minimum-cost frame selection.

Each segment becomes a DAG: one node per frame plus a virtual source and
sink, with forward edges joining frames up to ``tau_max`` apart.  An edge's
weight combines four non-negative terms (camera balance, motion velocity,
appearance change, semantic value) scaled by a skip penalty, and the output
frames are the interior of the minimum-cost source-to-sink path found by
Bellman-Ford.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .features import FrameRecord, VideoMeta, HIST_CHANNELS
from .metrics import SelectionReport, build_report
from .semantic import Segment, SemanticProfile
from .speedup import SpeedupPlan

FLOW_FLOOR = 1e-6  # lower guard for the video-wide flow target


@dataclass
class GraphParams:
    """Edge-cost weights and graph shape controls.

    ``F`` is the speed-up the graph is built for; selection overrides it per
    segment with the planned rate for that segment's class.  The unit term
    weights are heuristic defaults (each term is normalized to an O(1)
    scale, so equal weighting is a sensible starting point), not values
    carried over from any reference setup.
    """

    tau_max: int = 100
    alpha: float = 1.0
    beta: float = 1.0
    gamma: float = 1.0
    eta: float = 1.0
    epsilon: float = 1.0
    F: int = 10

    def __post_init__(self) -> None:
        if not isinstance(self.tau_max, int) or self.tau_max < 1:
            raise ValueError("tau_max must be an integer >= 1")
        if not isinstance(self.F, int) or self.F < 1:
            raise ValueError("F must be an integer >= 1")
        if min(self.alpha, self.beta, self.gamma, self.eta) < 0:
            raise ValueError("term weights must be non-negative")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")


@dataclass
class EdgeCosts:
    balance: float
    velocity: float
    appearance: float
    semantic: float
    weight: float


@dataclass
class SegmentPath:
    frames: list[int]
    total_cost: float


@dataclass
class SkipGraph:
    """Edge-list DAG for one segment.

    Node ids: 0 is the virtual source, 1..L are the segment's frames in
    order, L+1 is the virtual sink.  Edge arrays are sorted by (u, v); the
    ``table`` holds the per-term breakdown of the internal edges keyed by
    global frame indices, for dumping and inspection.
    """

    segment: Segment
    n_nodes: int
    us: list[int]
    vs: list[int]
    ws: list[float]
    table: dict[str, np.ndarray]
    params: GraphParams


def compute_target_flow(frames: Sequence[FrameRecord]) -> float:
    """Video-wide median of the per-transition flow magnitudes.

    Transitions without a flow estimate are ignored; the result is floored
    at a small positive value so velocity costs stay well defined.
    """
    vals = [f.flow_mag for f in frames if f.flow_mag is not None]
    med = float(np.median(vals)) if vals else 0.0
    return max(med, FLOW_FLOOR)


def _foe_center_distances(
    frames: Sequence[FrameRecord], meta: VideoMeta, lo: int, hi: int
) -> np.ndarray:
    """Distance of each transition FOE from the frame center, missing -> 0."""
    cx, cy = meta.center
    out = np.zeros(hi - lo, dtype=float)
    for t in range(lo, hi):
        foe = frames[t].foe
        if foe is not None:
            out[t - lo] = math.hypot(foe[0] - cx, foe[1] - cy)
    return out


def balance_cost(
    i: int, j: int, frames: Sequence[FrameRecord], meta: VideoMeta
) -> float:
    """Mean FOE offset from the image center over transitions [i, j).

    Normalized by the half-diagonal, so a FOE pinned to a corner scores 1.
    A missing FOE is taken to sit at the center and contributes zero.
    """
    if not i < j:
        raise ValueError("need i < j")
    dists = _foe_center_distances(frames, meta, i, j)
    return float(dists.mean()) / (meta.diagonal / 2.0)


def velocity_cost(
    i: int,
    j: int,
    frames: Sequence[FrameRecord],
    params: GraphParams,
    target_flow: float,
) -> float:
    """Relative gap between accumulated flow over [i, j) and F transitions'
    worth of typical motion.  Zero when the skip carries exactly the target
    amount of motion; missing flow estimates contribute nothing to the sum.
    """
    if not i < j:
        raise ValueError("need i < j")
    if not target_flow > 0:
        raise ValueError("target_flow must be positive")
    total = 0.0
    for t in range(i, j):
        if frames[t].flow_mag is not None:
            total += frames[t].flow_mag
    ft = params.F * target_flow
    return abs(total - ft) / ft


def appearance_cost(i: int, j: int, frames: Sequence[FrameRecord]) -> float:
    """Histogram transport distance between frames i and j.

    Each contiguous third of the histogram vector is one channel; per
    channel the 1-D earth mover's distance is the L1 gap between the two
    cumulative distributions, and channels are averaged.
    """
    hi, hj = frames[i].histogram, frames[j].histogram
    if hi.shape != hj.shape:
        raise ValueError("histogram length mismatch")
    per = hi.reshape(HIST_CHANNELS, -1)
    qer = hj.reshape(HIST_CHANNELS, -1)
    emd = np.abs(np.cumsum(per, axis=1) - np.cumsum(qer, axis=1)).sum(axis=1)
    return float(emd.mean())


def semantic_cost(S_i: float, S_j: float, epsilon: float) -> float:
    """Reciprocal of the joint semantic score: cheap to keep rich frames."""
    if S_i < 0 or S_j < 0:
        raise ValueError("scores must be non-negative")
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    return 1.0 / (S_i + S_j + epsilon)


def skip_multiplier(skip: int, F: int) -> int:
    """ceil(skip / F) on positive integers."""
    return -(-skip // F)


def edge_weight(
    balance: float,
    velocity: float,
    appearance: float,
    semantic: float,
    params: GraphParams,
    skip: int,
) -> float:
    """Combine the four terms and scale by the skip penalty."""
    if not 1 <= skip <= params.tau_max:
        raise ValueError(f"skip {skip} outside [1, {params.tau_max}]")
    base = (
        params.alpha * balance
        + params.beta * velocity
        + params.gamma * appearance
        + params.eta * semantic
    )
    return base * skip_multiplier(skip, params.F)


def edge_costs(
    i: int,
    j: int,
    frames: Sequence[FrameRecord],
    scores: Sequence[float] | np.ndarray,
    params: GraphParams,
    meta: VideoMeta,
    target_flow: float,
) -> EdgeCosts:
    """All four terms plus the combined weight for one edge (i, j)."""
    s = np.asarray(scores, dtype=float)
    b = balance_cost(i, j, frames, meta)
    v = velocity_cost(i, j, frames, params, target_flow)
    a = appearance_cost(i, j, frames)
    sem = semantic_cost(float(s[i]), float(s[j]), params.epsilon)
    w = edge_weight(b, v, a, sem, params, j - i)
    return EdgeCosts(balance=b, velocity=v, appearance=a, semantic=sem, weight=w)


def anchor_width(F: int, length: int, tau_max: int) -> int:
    """Number of boundary frames wired to the virtual source/sink.

    min(F, segment length), additionally capped at tau_max // 2 so that the
    gap across a segment boundary can never exceed tau_max.
    """
    return min(F, length, max(1, tau_max // 2))


def build_graph(
    segment: Segment,
    frames: Sequence[FrameRecord],
    scores: Sequence[float] | np.ndarray,
    params: GraphParams,
    meta: VideoMeta,
    target_flow: float,
) -> SkipGraph:
    """Assemble the weighted skip DAG for one segment.

    ``frames`` and ``scores`` cover the whole video; the segment picks the
    slice.  Internal edges join frames (i, j) with 1 <= j - i <= tau_max;
    the virtual source feeds the first few frames and the last few feed the
    sink, all at zero cost (see :func:`anchor_width`).
    """
    L = segment.length
    if L < 2:
        raise ValueError(f"segment [{segment.start}, {segment.end}) too short to build a graph")
    a, b = segment.start, segment.end
    if b > len(frames):
        raise ValueError("segment extends past the frame list")
    if not target_flow > 0:
        raise ValueError("target_flow must be positive")

    s = np.asarray(scores, dtype=float)[a:b]
    half_diag = meta.diagonal / 2.0
    ft = params.F * target_flow

    dists = _foe_center_distances(frames, meta, a, b)
    P = np.concatenate(([0.0], np.cumsum(dists)))
    flows = np.array(
        [f.flow_mag if f.flow_mag is not None else 0.0 for f in frames[a:b]],
        dtype=float,
    )
    Q = np.concatenate(([0.0], np.cumsum(flows)))
    hists = np.stack([f.histogram for f in frames[a:b]])
    cdf = np.cumsum(hists.reshape(L, HIST_CHANNELS, -1), axis=2)

    us_parts, vs_parts, ws_parts = [], [], []
    ti, tj = [], []
    tB, tV, tA, tS, tW = [], [], [], [], []
    for d in range(1, min(params.tau_max, L - 1) + 1):
        idx = np.arange(L - d)
        B = (P[idx + d] - P[idx]) / d / half_diag
        V = np.abs((Q[idx + d] - Q[idx]) - ft) / ft
        A = np.abs(cdf[d:] - cdf[: L - d]).sum(axis=2).mean(axis=1)
        S = 1.0 / (s[: L - d] + s[d:] + params.epsilon)
        base = params.alpha * B + params.beta * V + params.gamma * A + params.eta * S
        W = base * skip_multiplier(d, params.F)
        us_parts.append(idx + 1)
        vs_parts.append(idx + d + 1)
        ws_parts.append(W)
        ti.append(idx + a)
        tj.append(idx + d + a)
        tB.append(B)
        tV.append(V)
        tA.append(A)
        tS.append(S)
        tW.append(W)

    aw = anchor_width(params.F, L, params.tau_max)
    us_parts.append(np.zeros(aw, dtype=np.int64))
    vs_parts.append(np.arange(1, aw + 1, dtype=np.int64))
    ws_parts.append(np.zeros(aw, dtype=float))
    us_parts.append(np.arange(L - aw + 1, L + 1, dtype=np.int64))
    vs_parts.append(np.full(aw, L + 1, dtype=np.int64))
    ws_parts.append(np.zeros(aw, dtype=float))

    us = np.concatenate(us_parts).astype(np.int64)
    vs = np.concatenate(vs_parts).astype(np.int64)
    ws = np.concatenate(ws_parts)
    order = np.lexsort((vs, us))

    table = {
        "i": np.concatenate(ti) if ti else np.zeros(0, dtype=np.int64),
        "j": np.concatenate(tj) if tj else np.zeros(0, dtype=np.int64),
        "balance": np.concatenate(tB) if tB else np.zeros(0),
        "velocity": np.concatenate(tV) if tV else np.zeros(0),
        "appearance": np.concatenate(tA) if tA else np.zeros(0),
        "semantic": np.concatenate(tS) if tS else np.zeros(0),
        "weight": np.concatenate(tW) if tW else np.zeros(0),
    }
    return SkipGraph(
        segment=segment,
        n_nodes=L + 2,
        us=us[order].tolist(),
        vs=vs[order].tolist(),
        ws=ws[order].tolist(),
        table=table,
        params=params,
    )


def _chain(pred: list[int], node: int) -> list[int]:
    seq = []
    while node != -1:
        seq.append(node)
        node = pred[node]
    seq.reverse()
    return seq


def _scaled_integer_weights(ws: list[float]) -> list[int]:
    """Edge weights as exact integers over a shared power-of-two denominator.

    Float addition is order-dependent at the last ulp, so two paths can sum
    to the same double while their prefixes differ; comparing exact dyadic
    rationals instead makes the path minimum and its ties well defined.
    """
    ratios = [w.as_integer_ratio() for w in ws]
    scale = max(den for _, den in ratios)
    return [num * (scale // den) for num, den in ratios]


def shortest_path(graph: SkipGraph) -> SegmentPath:
    """Minimum-cost source-to-sink path by Bellman-Ford.

    Edges are relaxed in (u, v) order each round until a round changes
    nothing; with forward-only edges the first round already settles every
    node, and the loop asserts convergence within |V| rounds.  Distances
    accumulate as scaled integers so cost comparison is exact.  Ties are
    broken toward fewer frames, then the lexicographically smallest frame
    sequence (equal-cost, equal-length predecessor chains are compared
    explicitly; exact cost ties are rare so the walk stays off hot paths).
    The reported total is the correctly rounded float sum of the chosen
    path's edge weights.
    """
    n = graph.n_nodes
    wints = _scaled_integer_weights(graph.ws)
    dist: list[int | None] = [None] * n
    hops = [0] * n
    pred = [-1] * n
    pred_w = [0.0] * n
    dist[0] = 0

    for _ in range(n):
        changed = False
        for u, v, w, wi in zip(graph.us, graph.vs, graph.ws, wints):
            du = dist[u]
            if du is None:
                continue
            cand = du + wi
            dv = dist[v]
            if dv is None or cand < dv:
                dist[v] = cand
                hops[v] = hops[u] + 1
                pred[v] = u
                pred_w[v] = w
                changed = True
            elif cand == dv:
                h = hops[u] + 1
                if h < hops[v]:
                    hops[v] = h
                    pred[v] = u
                    pred_w[v] = w
                    changed = True
                elif h == hops[v] and u != pred[v]:
                    if _chain(pred, u) < _chain(pred, pred[v]):
                        pred[v] = u
                        pred_w[v] = w
                        changed = True
        if not changed:
            break
    else:
        raise AssertionError(
            "relaxation did not converge within |V| rounds; negative-weight cycle"
        )

    sink = n - 1
    if dist[sink] is None:
        raise AssertionError("sink unreachable; graph construction broken")
    nodes = _chain(pred, sink)
    frames = [graph.segment.start + (node - 1) for node in nodes[1:-1]]
    for x, y in zip(frames, frames[1:]):
        if not 0 < y - x <= graph.params.tau_max:
            raise AssertionError("path violates the skip bound")
    total = math.fsum(pred_w[node] for node in nodes[1:])
    return SegmentPath(frames=frames, total_cost=total)


def select_frames(
    profile: SemanticProfile,
    plan: SpeedupPlan,
    frames: Sequence[FrameRecord],
    meta: VideoMeta,
    graph_params: GraphParams,
) -> SelectionReport:
    """Run the per-segment graphs and merge their paths into one selection.

    Each segment's graph is built with F set to the planned rate for its
    class; paths are concatenated in temporal order and scored into a full
    report.
    """
    if len(profile.raw_scores) != len(frames):
        raise ValueError("profile does not cover the frame list")
    target_flow = compute_target_flow(frames)
    indices: list[int] = []
    for seg in profile.segments:
        params = replace(graph_params, F=plan.rate_for(seg.label))
        graph = build_graph(seg, frames, profile.raw_scores, params, meta, target_flow)
        path = shortest_path(graph)
        indices.extend(path.frames)
    for x, y in zip(indices, indices[1:]):
        if y <= x:
            raise AssertionError("segment paths overlap; selection not increasing")
    return build_report(
        indices=indices,
        scores=profile.raw_scores,
        frames=frames,
        meta=meta,
        F_d=plan.F_d,
        tau_max=graph_params.tau_max,
    )


def write_graph_csv(path: str | Path, graph: SkipGraph) -> None:
    """Dump the internal edges (global indices and term breakdown)."""
    t = graph.table
    order = np.lexsort((t["j"], t["i"]))
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["i", "j", "balance", "velocity", "appearance", "semantic", "weight"])
        for k in order:
            writer.writerow(
                [int(t["i"][k]), int(t["j"][k])]
                + [repr(float(t[c][k])) for c in ("balance", "velocity", "appearance", "semantic", "weight")]
            )


__all__ = [
    "GraphParams",
    "EdgeCosts",
    "SegmentPath",
    "SkipGraph",
    "compute_target_flow",
    "balance_cost",
    "velocity_cost",
    "appearance_cost",
    "semantic_cost",
    "skip_multiplier",
    "edge_weight",
    "anchor_width",
    "build_graph",
    "shortest_path",
    "select_frames",
    "write_graph_csv",
]
