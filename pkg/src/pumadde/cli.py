"""Command-line entry point: ``pumadde <command> --config PATH``."""
from __future__ import annotations

import argparse
import csv
import json
import sys
import warnings
from pathlib import Path

from .config import ConfigError, RunConfig, parse_config
from .ddesolve import HistorySpec, integrate, write_events_csv, write_trajectory_csv
from .model import find_equilibria
from .plot import PlotOptions, render_svg
from .scenarios import run_grid, run_scenario, write_aggregate_csv, write_grid_csv
from .stability import classify_equilibrium, format_verdict, verdict_record

COMMANDS = ("equilibria", "stability", "simulate", "grid", "scenario")


def _equilibria(cfg: RunConfig, out: Path, opts) -> list[Path]:
    params = cfg.require_model()
    eqs = find_equilibria(params)
    path = out / "equilibria.csv"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "y", "kind", "residual", "tangential"])
        for e in eqs:
            w.writerow([repr(e.x), repr(e.y), e.kind.value, repr(e.residual),
                        str(e.tangential).lower()])
            print(f"{e.kind.value:9s} x={e.x:.10g} y={e.y:.10g} residual={e.residual:.3g}")
    return [path]


def _stability(cfg: RunConfig, out: Path, opts) -> list[Path]:
    params = cfg.require_model()
    tau_ref = cfg.tau_ref if cfg.tau_ref is not None else params.tau
    blocks, records = [], []
    for e in find_equilibria(params):
        v = classify_equilibrium(params, e, tau_ref=tau_ref, j_max=cfg.j_max)
        blocks.append(format_verdict(e, v))
        records.append(verdict_record(e, v))
    text = "\n".join(blocks) + "\n"
    print(text, end="")
    txt, rec = out / "stability.txt", out / "stability.json"
    txt.write_text(text)
    rec.write_text(json.dumps({"tau_ref": tau_ref, "j_max": cfg.j_max,
                               "verdicts": records}, indent=2) + "\n")
    return [txt, rec]


def _write_plot(traj, out: Path, cfg: RunConfig, opts, stem: str) -> list[Path]:
    if not (opts.svg or cfg.svg):
        return []
    path = out / f"{stem}.svg"
    path.write_text(render_svg(traj, PlotOptions(log_prey=opts.log_prey or cfg.log_prey)))
    return [path]


def _simulate(cfg: RunConfig, out: Path, opts) -> list[Path]:
    params = cfg.require_model()
    traj = integrate(params, HistorySpec.constant(*cfg.initial_history()), cfg.t_end, cfg.step)
    path = out / "trajectory.csv"
    write_trajectory_csv(traj, path)
    x, y = traj.terminal
    print(f"t_end={traj.t_end:g} x={x:.10g} y={y:.10g} h={traj.h:.6g} clamped={traj.clamp_count}")
    return [path] + _write_plot(traj, out, cfg, opts, "trajectory")


def _scenario(cfg: RunConfig, out: Path, opts) -> list[Path]:
    params = cfg.require_model()
    if not cfg.rules:
        raise ConfigError("scenario.rules: at least one rule is required")
    traj = run_scenario(params, cfg.rules, HistorySpec.constant(*cfg.initial_history()),
                        cfg.t_end, cfg.step)
    tpath, epath = out / "trajectory.csv", out / "events.csv"
    write_trajectory_csv(traj, tpath)
    write_events_csv(traj, epath)
    x, y = traj.terminal
    print(f"events={len(traj.events)} t_end={traj.t_end:g} x={x:.10g} y={y:.10g}")
    return [tpath, epath] + _write_plot(traj, out, cfg, opts, "scenario")


def _grid(cfg: RunConfig, out: Path, opts) -> list[Path]:
    if cfg.grid is None:
        raise ConfigError("grid: section is required for this command")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        summary = run_grid(cfg.grid)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    runs, agg = out / "grid_runs.csv", out / "grid_summary.csv"
    write_grid_csv(summary, runs)
    write_aggregate_csv(summary, agg)
    for cat, pct in summary.percentages.items():
        print(f"{cat.value:20s} {summary.counts[cat]:4d}  {pct:5.1f}%")
    return [runs, agg]


_HANDLERS = {"equilibria": _equilibria, "stability": _stability, "simulate": _simulate,
             "grid": _grid, "scenario": _scenario}


def dispatch(command: str, cfg: RunConfig, out_dir: str | Path | None = None,
             svg: bool = False, log_prey: bool = False) -> list[Path]:
    """Run one command and return the files it wrote."""
    if command not in _HANDLERS:
        raise ValueError(f"unknown command {command!r}")
    out = Path(out_dir if out_dir is not None else (cfg.out_dir or "."))
    out.mkdir(parents=True, exist_ok=True)
    opts = argparse.Namespace(svg=svg, log_prey=log_prey)
    return _HANDLERS[command](cfg, out, opts)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pumadde",
                                 description="Delayed predator-prey model toolkit.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", required=True, help="JSON run configuration")
    ap.add_argument("--out", help="output directory (default: output.dir or cwd)")
    ap.add_argument("--svg", action="store_true", help="also write an SVG plot")
    ap.add_argument("--log-prey", action="store_true", help="log10 prey axis in the SVG")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = parse_config(Path(args.config).read_text())
        dispatch(args.command, cfg, args.out, args.svg, args.log_prey)
    except Exception as exc:  # noqa: BLE001  one-line diagnostic for any failure
        msg = " ".join(str(exc).split()) or type(exc).__name__
        print(f"pumadde {args.command}: error: {msg}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
