"""Run the default 216-point sweep and print the category split.

    python scripts/run_grid.py --workers 4 --out results/grid
"""
import argparse
import time
from dataclasses import replace
from pathlib import Path

from pumadde.scenarios import GridSpec, run_grid, write_aggregate_csv, write_grid_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--t-end", type=float, default=1000.0)
    ap.add_argument("--steps-per-delay", type=int, default=640)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", type=Path)
    args = ap.parse_args()

    spec = GridSpec(t_end=args.t_end, workers=args.workers)
    spec = replace(spec, h=spec.tau / args.steps_per_delay)
    start = time.perf_counter()
    summary = run_grid(spec)
    print(f"{len(summary.runs)} runs in {time.perf_counter() - start:.1f} s, "
          f"{len(summary.failures)} failed")
    for cat, pct in summary.percentages.items():
        print(f"  {cat.value:<20} {summary.counts[cat]:4d}  {pct:5.1f}%")
    if args.out:
        args.out.mkdir(parents=True, exist_ok=True)
        write_grid_csv(summary, args.out / "grid_runs.csv")
        write_aggregate_csv(summary, args.out / "grid_summary.csv")


if __name__ == "__main__":
    main()
