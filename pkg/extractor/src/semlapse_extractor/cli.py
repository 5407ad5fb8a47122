"""Command-line front end for feature extraction.

``extract`` writes a feature file the selection engine consumes directly;
``pairwise-foe`` computes true between-selected-frame FOEs for an existing
selection (CSV).  Exit codes: 0 ok, 1 runtime error, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import DETECTORS, ExtractionConfig
from .extract import extract, pairwise_foe, write_feature_file, write_foe_csv


def _config_from_args(args: argparse.Namespace) -> ExtractionConfig:
    return ExtractionConfig(
        detector=args.detector,
        confidence_scale=args.confidence_scale,
        cascade_path=str(args.cascade) if args.cascade else None,
        hist_bins=args.bins,
        stride=args.stride,
    )


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


def _cmd_extract(args: argparse.Namespace) -> int:
    meta, records = extract(args.video, _config_from_args(args))
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_feature_file(meta, records, out)
    print(f"wrote {meta['frame_count']} frames to {out}")
    return 0


def _cmd_pairwise_foe(args: argparse.Namespace) -> int:
    indices = _read_indices(args.indices)
    points = pairwise_foe(args.video, indices)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_foe_csv(points, out)
    print(f"wrote {len(points)} transition FOEs to {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="semlapse-extract",
        description="Extract selection-engine features from video files.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="video -> feature file (JSON Lines)")
    p.add_argument("--video", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--detector", choices=DETECTORS, default="blob",
                   help="blob: self-contained color/shape detector; "
                        "haar: OpenCV cascade (needs cascade XML)")
    p.add_argument("--cascade", type=Path, default=None,
                   help="cascade XML for --detector haar")
    p.add_argument("--confidence-scale", type=float, default=12.0,
                   help="maps raw detector quality onto the engine's 0-120 scale")
    p.add_argument("--bins", type=int, default=32, help="histogram bins per channel")
    p.add_argument("--stride", type=int, default=1, help="keep every n-th frame")
    p.set_defaults(func=_cmd_extract)

    p = sub.add_parser("pairwise-foe",
                       help="FOE between consecutive selected frames -> CSV")
    p.add_argument("--video", type=Path, required=True)
    p.add_argument("--indices", type=Path, required=True,
                   help="newline-separated frame indices (a selection)")
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=_cmd_pairwise_foe)

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
