"""Command-line front end.

Subcommands cover each stage (score, segment, plan, select) plus the
reference selectors, metric evaluation of an arbitrary selection, and a
synthetic scenario generator.  Configuration merges three layers, later
ones winning: built-in defaults, a JSON config file (--config), then flags.
Every artifact is plain text and byte-identical across reruns on identical
inputs.  Exit codes: 0 ok, 1 runtime error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .baselines import naive_faces_sample, naive_sample
from .config import RunConfig, build_config, load_config_file
from .features import benchmark_scenario, load_features, synth_features, write_features
from .metrics import build_report
from .pipeline import compute_profile, run_pipeline
from .semantic import write_score_csv
from .speedup import objective_surface_csv, plan_from_segments, segment_lengths

_CONFIG_FLAGS: list[tuple[str, type, str]] = [
    ("sigma", float, "spatial score spread in pixels (default: max(W, H) / 2)"),
    ("theta", float, "reject detections below this confidence (default 10)"),
    ("zeta", float, "accept detections at or above this confidence (default 60)"),
    ("persistence-window", int, "frames inspected around a mid-confidence detection (default 15)"),
    ("persistence-min-hits", int, "supporting frames required inside the window (default 5)"),
    ("kernel-sigma", float, "temporal smoothing sigma in frames (default: fps)"),
    ("min-segment-len", int, "shortest allowed segment in frames (default: 2 * speedup)"),
    ("speedup", int, "desired overall speed-up F_d (default 10)"),
    ("lambda1", float, "rate-gap penalty weight (default 40)"),
    ("lambda2", float, "semantic-rate penalty weight (default 8)"),
    ("max-speedup", int, "upper bound of the rate search grid (default 100)"),
    ("tau-max", int, "maximum frame skip in the graph (default 100)"),
    ("alpha", float, "balance term weight (default 1)"),
    ("beta", float, "velocity term weight (default 1)"),
    ("gamma", float, "appearance term weight (default 1)"),
    ("eta", float, "semantic term weight (default 1)"),
    ("epsilon", float, "semantic cost regularizer (default 1)"),
    ("seed", int, "seed for synthetic scenarios (default 0)"),
]


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("engine configuration (defaults < config file < flags)")
    g.add_argument("--config", type=Path, default=None,
                   help="JSON config file with any of the flag names below as keys")
    for name, typ, help_text in _CONFIG_FLAGS:
        g.add_argument(f"--{name}", type=typ, default=None, help=help_text)
    g.add_argument("--normalize-area", action=argparse.BooleanOptionalAction,
                   default=None, help="divide detection areas by the frame area")


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    file_values = load_config_file(args.config) if args.config else {}
    flag_values = {}
    for name, _, _ in _CONFIG_FLAGS:
        key = name.replace("-", "_")
        flag_values[key] = getattr(args, key, None)
    flag_values["normalize_area"] = getattr(args, "normalize_area", None)
    return build_config(file_values, flag_values)


def _write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def _write_json(path: Path, obj: dict) -> None:
    _write_text(path, json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n")


def _read_indices(path: Path) -> list[int]:
    out = []
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        try:
            out.append(int(line))
        except ValueError:
            raise ValueError(f"indices file {path} line {lineno}: not an integer") from None
    if not out:
        raise ValueError(f"indices file {path} is empty")
    return out


def _indices_text(indices: list[int]) -> str:
    return "\n".join(str(i) for i in indices) + "\n"


def _cmd_synth(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args)
    scenario = benchmark_scenario(
        seed=cfg.seed, frame_count=args.frames,
        width=args.width, height=args.height, fps=args.fps,
    )
    meta, records = synth_features(scenario)
    write_features(meta, records, args.out)
    print(f"wrote {meta.frame_count} frames to {args.out}")
    return 0


def _cmd_score(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args)
    meta, frames = load_features(args.features)
    profile = compute_profile(meta, frames, cfg)
    write_score_csv(args.out, profile)
    print(f"wrote scores for {meta.frame_count} frames to {args.out}")
    return 0


def _cmd_segment(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args)
    meta, frames = load_features(args.features)
    profile = compute_profile(meta, frames, cfg)
    rows = ["start,end,length,label"]
    for seg in profile.segments:
        rows.append(f"{seg.start},{seg.end},{seg.length},{seg.label}")
    _write_text(args.out, "\n".join(rows) + "\n")
    print(f"threshold={profile.threshold!r} segments={len(profile.segments)}")
    return 0


def _cmd_plan(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args)
    meta, frames = load_features(args.features)
    profile = compute_profile(meta, frames, cfg)
    plan = plan_from_segments(profile.segments, cfg.speedup_config())
    _write_json(args.out, {
        "F_s": plan.F_s, "F_ns": plan.F_ns, "F_d": plan.F_d,
        "objective": plan.objective, "D_value": plan.D_value,
        "L_s": plan.L_s, "L_ns": plan.L_ns,
    })
    if args.surface is not None:
        L_s, L_ns = segment_lengths(profile.segments)
        _write_text(args.surface, objective_surface_csv(L_s, L_ns, cfg.speedup_config()))
    print(f"F_s={plan.F_s} F_ns={plan.F_ns} (F_d={plan.F_d})")
    return 0


def _cmd_select(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args)
    meta, frames = load_features(args.features)
    result = run_pipeline(meta, frames, cfg)
    _write_text(args.out_indices, _indices_text(result.report.indices))
    _write_json(args.out_report, result.report.to_dict())
    print(
        f"selected {len(result.report.indices)} of {meta.frame_count} frames "
        f"(speed-up {result.report.achieved_speedup:.2f})"
    )
    return 0


def _cmd_baseline(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args)
    meta, frames = load_features(args.features)
    profile = compute_profile(meta, frames, cfg)
    if args.method == "naive":
        indices = naive_sample(meta.frame_count, cfg.speedup)
    else:
        indices = naive_faces_sample(profile.raw_scores, cfg.speedup)
    report = build_report(indices, profile.raw_scores, frames, meta,
                          cfg.speedup, cfg.tau_max)
    _write_text(args.out_indices, _indices_text(report.indices))
    _write_json(args.out_report, report.to_dict())
    print(f"{args.method}: selected {len(indices)} of {meta.frame_count} frames")
    return 0


def _cmd_evaluate(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args)
    meta, frames = load_features(args.features)
    profile = compute_profile(meta, frames, cfg)
    indices = _read_indices(args.indices)
    report = build_report(indices, profile.raw_scores, frames, meta,
                          cfg.speedup, cfg.tau_max)
    _write_json(args.out, report.to_dict())
    print(f"semantic_amount={report.semantic_amount!r}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="semlapse",
        description="Semantic fast-forward frame selection over feature files.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic benchmark feature file")
    p.add_argument("--out", type=Path, required=True, help="feature file to write")
    p.add_argument("--frames", type=int, default=5000, help="frame count (default 5000)")
    p.add_argument("--width", type=int, default=1280)
    p.add_argument("--height", type=int, default=720)
    p.add_argument("--fps", type=float, default=30.0)
    _add_config_flags(p)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("score", help="per-frame semantic scores as CSV")
    p.add_argument("--features", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True, help="CSV to write")
    _add_config_flags(p)
    p.set_defaults(func=_cmd_score)

    p = sub.add_parser("segment", help="semantic/non-semantic segmentation as CSV")
    p.add_argument("--features", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True, help="CSV to write")
    _add_config_flags(p)
    p.set_defaults(func=_cmd_segment)

    p = sub.add_parser("plan", help="allocate per-class speed-up rates")
    p.add_argument("--features", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True, help="plan JSON to write")
    p.add_argument("--surface", type=Path, default=None,
                   help="also dump the full objective grid as CSV")
    _add_config_flags(p)
    p.set_defaults(func=_cmd_plan)

    p = sub.add_parser("select", help="run the full pipeline and select frames")
    p.add_argument("--features", type=Path, required=True)
    p.add_argument("--out-indices", type=Path, required=True,
                   help="newline-separated frame indices")
    p.add_argument("--out-report", type=Path, required=True, help="report JSON")
    _add_config_flags(p)
    p.set_defaults(func=_cmd_select)

    p = sub.add_parser("baseline", help="run a reference selector")
    p.add_argument("--features", type=Path, required=True)
    p.add_argument("--method", choices=("naive", "naive-faces"), required=True)
    p.add_argument("--out-indices", type=Path, required=True)
    p.add_argument("--out-report", type=Path, required=True)
    _add_config_flags(p)
    p.set_defaults(func=_cmd_baseline)

    p = sub.add_parser("evaluate", help="score an existing selection")
    p.add_argument("--features", type=Path, required=True)
    p.add_argument("--indices", type=Path, required=True,
                   help="newline-separated frame indices to evaluate")
    p.add_argument("--out", type=Path, required=True, help="report JSON")
    _add_config_flags(p)
    p.set_defaults(func=_cmd_evaluate)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # single-line machine-parsable failure
        msg = " ".join(str(exc).splitlines()) or exc.__class__.__name__
        print(f"error: {msg}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
