"""Sweep the rate-allocation penalties and map where non-trivial plans win.

For a fixed semantic/non-semantic length split, sweeps (lambda1, lambda2)
over a grid and records the chosen (F_s, F_ns).  With lambda1 >= lambda2 the
optimum provably collapses to F_s = F_ns = F_d, so the interesting region is
lambda1 < lambda2; the CSV makes that boundary visible.
"""

import argparse
import csv
from pathlib import Path
import sys

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from semlapse.speedup import SpeedupConfig, optimize_speedups


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--semantic-frames", type=int, default=3000)
    parser.add_argument("--non-semantic-frames", type=int, default=7000)
    parser.add_argument("--speedup", type=int, default=10)
    parser.add_argument("--max-speedup", type=int, default=100)
    parser.add_argument("--lambda-max", type=float, default=50.0,
                        help="sweep both penalties over [0, lambda-max]")
    parser.add_argument("--steps", type=int, default=11,
                        help="grid resolution per axis (default 11)")
    parser.add_argument("--out", type=Path, default=Path("allocation_sweep.csv"))
    args = parser.parse_args()

    values = [args.lambda_max * k / (args.steps - 1) for k in range(args.steps)]
    rows = []
    for lam1 in values:
        for lam2 in values:
            cfg = SpeedupConfig(F_d=args.speedup, lambda1=lam1, lambda2=lam2,
                                max_speedup=args.max_speedup)
            plan = optimize_speedups(args.semantic_frames,
                                     args.non_semantic_frames, cfg)
            rows.append({
                "lambda1": repr(lam1),
                "lambda2": repr(lam2),
                "F_s": plan.F_s,
                "F_ns": plan.F_ns,
                "D": repr(plan.D_value),
                "objective": repr(plan.objective),
            })

    args.out.parent.mkdir(parents=True, exist_ok=True)
    with args.out.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
        writer.writeheader()
        writer.writerows(rows)

    nontrivial = sum(r["F_s"] != r["F_ns"] for r in rows)
    print(f"wrote {len(rows)} grid points to {args.out}")
    print(f"non-trivial plans (F_s != F_ns): {nontrivial}/{len(rows)}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
