#!/usr/bin/env python3
"""Run the demo benchmark matrix and print per-cell certificate outcomes.

Equivalent to `adaagm-bench run configs/benchmark.ini`, kept as a script so
the output directory and thread count are easy to tweak while exploring.
"""

import argparse
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from adaagm.config import load_config
from adaagm.runner import run_experiment

DEFAULT_CONFIG = os.path.join(os.path.dirname(__file__), "..", "configs",
                              "benchmark.ini")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", default=DEFAULT_CONFIG)
    ap.add_argument("--out", default="runs")
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()

    config = load_config(args.config)
    config.output_dir = args.out
    summary = run_experiment(config, threads=args.threads)

    width = max(len(f"{r.problem} x {r.solver}") for r in summary.results)
    for r in summary.results:
        cell = f"{r.problem} x {r.solver}"
        gap = "-" if r.final_gap is None else f"{r.final_gap:.3e}"
        print(f"{cell:<{width}} seed={r.seed} {r.status:>8} "
              f"iters={r.iterations:>6} gap={gap:>10} {r.certificates}")
    print(f"\ntraces and summary.csv written to {summary.output_dir}")
    return 2 if summary.any_divergence else 0


if __name__ == "__main__":
    sys.exit(main())
