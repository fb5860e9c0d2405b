"""Parameter sweeps with trajectory classification, and culling scenarios."""
from __future__ import annotations

import csv
import enum
import itertools
import math
import warnings
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .ddesolve import (DEFAULT_T_END, EventRule, HistorySpec, IntegrationError, Trajectory,
                       integrate)
from .model import ModelParams

EPS_EXTINCT = 1e-3
OSC_REL = 0.1
WINDOW_FRACTION = 0.2
MIN_WINDOW_NODES = 10
# RK4 needs this much resolution at the stiffest corners of the default grid
GRID_STEPS_PER_DELAY = 640

DEFAULT_SWEEP = {
    "r": (0.05, 0.1, 0.2),
    "K": (200.0, 500.0),
    "a": (0.1, 0.5, 0.8),
    "gamma": (0.1, 0.5, 0.8),
    "beta": (0.05, 0.1),
    "N": (1.0, 2.0),
}
SWEPT = ("r", "K", "a", "gamma", "beta", "N")


class TrajectoryCategory(enum.Enum):
    POSITIVE_EQUILIBRIUM = "PositiveEquilibrium"
    PREDATOR_EXTINCTION = "PredatorExtinction"
    OSCILLATING = "Oscillating"


class ClassificationError(ValueError):
    pass


def classify_trajectory(traj: Trajectory, eps_extinct: float = EPS_EXTINCT,
                        osc_rel: float = OSC_REL) -> TrajectoryCategory:
    """Category of the long-run behaviour, judged on the last 20% of the run.

    Extinction if the predator stays below ``eps_extinct`` there; otherwise
    oscillating if either component's range exceeds ``osc_rel`` times its
    mean; otherwise a positive equilibrium.
    """
    span = traj.t_end - traj.t0
    needed = max(5 * traj.tau, 500.0)
    if span < needed:
        raise ClassificationError(f"trajectory covers {span:g} time units, needs {needed:g}")
    start = traj.t_end - WINDOW_FRACTION * span
    mask = traj.times >= start
    if np.count_nonzero(mask) < MIN_WINDOW_NODES:
        raise ClassificationError("classification window holds fewer than 10 grid nodes")
    w = traj.states[mask]
    if w[:, 1].max() < eps_extinct:
        return TrajectoryCategory.PREDATOR_EXTINCTION
    for k in range(2):
        col = w[:, k]
        if (col.max() - col.min()) / max(col.mean(), 1e-12) > osc_rel:
            return TrajectoryCategory.OSCILLATING
    return TrajectoryCategory.POSITIVE_EQUILIBRIUM


@dataclass(frozen=True)
class GridSpec:
    """Cartesian sweep over the six ecological parameters at one delay.

    ``history`` of None means the constant history (K/2, 1) per run, and
    ``h`` of None means tau/640.
    """

    r: tuple[float, ...] = DEFAULT_SWEEP["r"]
    K: tuple[float, ...] = DEFAULT_SWEEP["K"]
    a: tuple[float, ...] = DEFAULT_SWEEP["a"]
    gamma: tuple[float, ...] = DEFAULT_SWEEP["gamma"]
    beta: tuple[float, ...] = DEFAULT_SWEEP["beta"]
    N: tuple[float, ...] = DEFAULT_SWEEP["N"]
    tau: float = 27.0
    history: tuple[float, float] | None = None
    t_end: float = DEFAULT_T_END
    h: float | None = None
    eps_extinct: float = EPS_EXTINCT
    osc_rel: float = OSC_REL
    workers: int = 1

    def __post_init__(self):
        for name in SWEPT:
            vals = tuple(float(v) for v in getattr(self, name))
            if not vals:
                raise ValueError(f"grid list {name!r} is empty")
            object.__setattr__(self, name, vals)
        if self.t_end <= 0:
            raise ValueError("t_end must be > 0")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    @property
    def size(self) -> int:
        return math.prod(len(getattr(self, n)) for n in SWEPT)

    def parameter_sets(self) -> list[ModelParams]:
        """All combinations, in lexicographic order of the value lists."""
        lists = [sorted(getattr(self, n)) for n in SWEPT]
        return [ModelParams(*combo, tau=self.tau) for combo in itertools.product(*lists)]

    def step(self) -> float:
        if self.h is not None:
            return self.h
        return self.tau / GRID_STEPS_PER_DELAY if self.tau > 0 else 0.1


@dataclass(frozen=True)
class RunRecord:
    params: ModelParams
    category: TrajectoryCategory | None
    terminal: tuple[float, float] | None
    min_raw: float | None = None
    error: str = ""

    @property
    def ok(self) -> bool:
        return self.category is not None


@dataclass
class GridSummary:
    runs: list[RunRecord]
    counts: dict[TrajectoryCategory, int] = field(init=False)
    percentages: dict[TrajectoryCategory, float] = field(init=False)

    def __post_init__(self):
        good = [r for r in self.runs if r.ok]
        self.counts = {c: sum(r.category is c for r in good) for c in TrajectoryCategory}
        total = len(good)
        self.percentages = {c: (100.0 * n / total if total else 0.0)
                            for c, n in self.counts.items()}

    @property
    def failures(self) -> list[RunRecord]:
        return [r for r in self.runs if not r.ok]


def _run_one(args) -> RunRecord:
    params, spec = args
    hist = spec.history if spec.history is not None else (params.K / 2, 1.0)
    try:
        traj = integrate(params, HistorySpec.constant(*hist), spec.t_end, spec.step())
        cat = classify_trajectory(traj, spec.eps_extinct, spec.osc_rel)
    except (IntegrationError, ClassificationError) as exc:
        return RunRecord(params, None, None, error=str(exc))
    return RunRecord(params, cat, (float(traj.x[-1]), float(traj.y[-1])), traj.min_raw)


def run_grid(spec: GridSpec) -> GridSummary:
    """Integrate and classify every combination in ``spec``.

    Failed runs are kept in the record list but left out of the percentages.
    """
    jobs = [(p, spec) for p in spec.parameter_sets()]
    if spec.workers > 1:
        with ProcessPoolExecutor(spec.workers) as pool:
            runs = list(pool.map(_run_one, jobs))
    else:
        runs = [_run_one(j) for j in jobs]
    summary = GridSummary(runs)
    if summary.failures:
        warnings.warn(f"{len(summary.failures)} of {len(runs)} grid runs failed and were "
                      "excluded from the percentages", RuntimeWarning, stacklevel=2)
    return summary


def run_scenario(params: ModelParams, rule: EventRule | Sequence[EventRule],
                 history: HistorySpec, t_end: float = DEFAULT_T_END,
                 h: float | None = None) -> Trajectory:
    """Integrate with culling rule(s) attached; events are on ``traj.events``."""
    rules = (rule,) if isinstance(rule, EventRule) else tuple(rule)
    return integrate(params, history, t_end, h, rules=rules)


def write_grid_csv(summary: GridSummary, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([*SWEPT, "tau", "category", "x_end", "y_end"])
        for run in summary.runs:
            p = run.params
            vals = [repr(getattr(p, n)) for n in SWEPT] + [repr(p.tau)]
            if run.ok:
                w.writerow(vals + [run.category.value, repr(run.terminal[0]),
                                   repr(run.terminal[1])])
            else:
                w.writerow(vals + ["Failed", "", ""])


def write_aggregate_csv(summary: GridSummary, path) -> None:
    cats = list(TrajectoryCategory)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([c.value for c in cats] + ["failed"])
        w.writerow([repr(summary.percentages[c]) for c in cats] + [len(summary.failures)])
