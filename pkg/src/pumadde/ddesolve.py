"""Fixed-step method-of-steps integrator for two-species delay systems.

Classic RK4 on a grid whose step divides the delay, so every delayed
argument falls in already computed history.  Delayed values between nodes
come from cubic Hermite interpolation of stored states and derivatives.
Threshold rules remove a fraction of one population on upward crossings.
"""
from __future__ import annotations

import bisect
import csv
import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .model import ModelParams, State, _rhs_raw

NEG_TOL = 1e-9
DEFAULT_STEPS_PER_DELAY = 64
DEFAULT_ODE_STEP = 0.1
DEFAULT_T_END = 1000.0

Vector = Sequence[float]
RhsFunc = Callable[[float, Vector, Vector], Sequence[float]]


class IntegrationError(RuntimeError):
    """Raised when the solution leaves the admissible region.

    ``t_last`` is the last time at which the state was still valid.
    """

    def __init__(self, message: str, t_last: float):
        super().__init__(f"{message} (last valid t={t_last!r})")
        self.t_last = t_last


class Target(enum.Enum):
    PREY = "prey"
    PREDATOR = "predator"

    @property
    def index(self) -> int:
        return 0 if self is Target.PREY else 1


@dataclass(frozen=True)
class HistorySpec:
    """Constant initial history on [-tau, 0]."""

    value: tuple[float, ...]
    kind: str = "constant"

    def __post_init__(self):
        if self.kind != "constant":
            raise ValueError(f"unsupported history kind {self.kind!r}")
        object.__setattr__(self, "value", tuple(float(v) for v in self.value))
        if any(not math.isfinite(v) or v < 0 for v in self.value):
            raise ValueError(f"history must be finite and non-negative, got {self.value}")

    @classmethod
    def constant(cls, x: float, y: float) -> "HistorySpec":
        return cls((x, y))

    @classmethod
    def from_state(cls, s: State) -> "HistorySpec":
        return cls((s.x, s.y))


@dataclass(frozen=True)
class EventRule:
    target: Target
    threshold: float
    fraction_removed: float

    def __post_init__(self):
        if not isinstance(self.target, Target):
            object.__setattr__(self, "target", Target(self.target))
        if not (self.threshold > 0 and math.isfinite(self.threshold)):
            raise ValueError(f"threshold must be > 0, got {self.threshold!r}")
        if not 0 < self.fraction_removed < 1:
            raise ValueError(f"fraction_removed must lie in (0, 1), got {self.fraction_removed!r}")


@dataclass(frozen=True)
class EventRecord:
    time: float
    target: Target
    value_before: float
    value_after: float


@dataclass
class Trajectory:
    """Piecewise-cubic solution on [t0, t_end] plus event log.

    At an event time the grid holds two nodes with the same time: the
    pre-removal state followed by the post-removal state.
    """

    times: np.ndarray
    states: np.ndarray
    derivatives: np.ndarray
    events: list[EventRecord]
    tau: float
    h: float
    history: tuple[float, ...]
    clamp_count: int = 0
    min_raw: float = 0.0
    params: ModelParams | None = field(default=None, repr=False)

    @property
    def t0(self) -> float:
        return float(self.times[0])

    @property
    def t_end(self) -> float:
        return float(self.times[-1])

    @property
    def x(self) -> np.ndarray:
        return self.states[:, 0]

    @property
    def y(self) -> np.ndarray:
        return self.states[:, 1]

    @property
    def terminal(self) -> tuple[float, ...]:
        return tuple(float(v) for v in self.states[-1])


def _hermite(t, t0, t1, y0, y1, d0, d1):
    dt = t1 - t0
    s = (t - t0) / dt
    s2 = s * s
    s3 = s2 * s
    h00 = 2 * s3 - 3 * s2 + 1
    h10 = s3 - 2 * s2 + s
    h01 = -2 * s3 + 3 * s2
    h11 = s3 - s2
    return [h00 * a + h10 * dt * da + h01 * b + h11 * dt * db
            for a, b, da, db in zip(y0, y1, d0, d1)]


class _History:
    """Growing store of nodes with one-sided lookups.

    ``side="right"`` returns the right limit at a node (post-jump value) and
    ``side="left"`` the left limit, so a step never straddles a jump.
    """

    def __init__(self, t0: float, phi: Vector):
        self.t0 = t0
        self.phi = list(phi)
        self.times: list[float] = []
        self.states: list[list[float]] = []
        self.derivs: list[list[float]] = []

    def append(self, t, y, d):
        self.times.append(t)
        self.states.append(list(y))
        self.derivs.append(list(d))

    def __call__(self, t: float, side: str = "right") -> list[float]:
        times = self.times
        if t < self.t0 or (t == self.t0 and side == "left"):
            return self.phi
        if side == "right":
            i = bisect.bisect_right(times, t) - 1
            if times[i] == t or i == len(times) - 1:
                if times[i] != t:
                    raise ValueError(f"lookup t={t!r} beyond computed history {times[-1]!r}")
                return self.states[i]
            j = i + 1
        else:
            j = bisect.bisect_left(times, t)
            if j == len(times):
                raise ValueError(f"lookup t={t!r} beyond computed history {times[-1]!r}")
            if times[j] == t:
                return self.states[j]
            i = j - 1
        return _hermite(t, times[i], times[j], self.states[i], self.states[j],
                        self.derivs[i], self.derivs[j])


def effective_step(tau: float, h: float | None) -> float:
    """Largest step <= h that divides tau (tau/s for integer s)."""
    if h is None:
        return tau / DEFAULT_STEPS_PER_DELAY if tau > 0 else DEFAULT_ODE_STEP
    if not h > 0:
        raise ValueError(f"step must be > 0, got {h!r}")
    if tau <= 0:
        return h
    s = max(1, math.ceil(tau / h - 1e-9))
    return tau / s


def solve(func: RhsFunc, tau: float, history: Vector, t_end: float,
          h: float | None = None, rules: Sequence[EventRule] = (),
          t0: float = 0.0, check_sign: bool = True) -> Trajectory:
    """Integrate u'(t) = func(t, u(t), u(t - tau)) with constant history.

    The generic engine behind :func:`integrate`; ``func`` may be any
    right-hand side (used for verification problems).  With ``tau == 0`` the
    delayed argument is the current stage state.

    Raises
    ------
    IntegrationError
        On a non-finite state, or (if ``check_sign``) a component below
        ``-NEG_TOL``.  Smaller undershoot is clamped to zero and counted.
    """
    if not t_end > t0:
        raise ValueError(f"t_end must exceed t0, got {t_end!r}")
    if tau < 0:
        raise ValueError("tau must be >= 0")
    h = effective_step(tau, h)
    span = t_end - t0
    event_tol = 1e-10 * tau if tau > 0 else 1e-10
    eps_t = 1e-12 * max(1.0, abs(t_end))
    hist = _History(t0, history)
    delayed = tau > 0

    def lookup(t, side):
        return hist(t - tau, side) if delayed else None

    def rk4(t, u, dt, k1):
        # interior stages read the right limit, the c=1 stage the left limit
        half = 0.5 * dt
        dm = lookup(t + half, "right")
        u2 = [a + half * k for a, k in zip(u, k1)]
        k2 = func(t + half, u2, dm if delayed else u2)
        u3 = [a + half * k for a, k in zip(u, k2)]
        k3 = func(t + half, u3, dm if delayed else u3)
        u4 = [a + dt * k for a, k in zip(u, k3)]
        d1 = lookup(t + dt, "left")
        k4 = func(t + dt, u4, d1 if delayed else u4)
        return [a + dt / 6.0 * (b1 + 2 * b2 + 2 * b3 + b4)
                for a, b1, b2, b3, b4 in zip(u, k1, k2, k3, k4)], d1

    clamp_count = 0
    min_raw = min(history) if len(history) else 0.0

    def check(t, u, t_prev):
        nonlocal clamp_count, min_raw
        for i, v in enumerate(u):
            if not math.isfinite(v):
                raise IntegrationError(f"non-finite state component {i}", t_prev)
            if v < min_raw:
                min_raw = v
            if check_sign and v < 0:
                if v < -NEG_TOL:
                    raise IntegrationError(f"component {i} fell to {v!r} at t={t!r}", t_prev)
                u[i] = 0.0
                clamp_count += 1
        return u

    def accept(t, u, dl):
        """Store node(s) at t; returns the right derivative for the next step."""
        dr = lookup(t, "right")
        kl = list(func(t, u, dl if delayed else u))
        if dl is dr or dl == dr:
            hist.append(t, u, kl)
            return kl
        # delayed jump lands here: split the node so each side keeps its derivative
        kr = list(func(t, u, dr))
        hist.append(t, u, kl)
        hist.append(t, u, kr)
        return kr

    u = [float(v) for v in history]
    t = t0
    k1 = accept(t, u, lookup(t, "left"))
    n_steps = max(1, math.ceil(span / h - 1e-9))
    grid_k = 0
    breakpoints: list[float] = []
    armed = [u[r.target.index] < r.threshold for r in rules]
    events: list[EventRecord] = []

    while t < t_end - eps_t:
        nxt = t0 + (grid_k + 1) * h if grid_k + 1 < n_steps else t_end
        while nxt <= t + eps_t:
            grid_k += 1
            nxt = t0 + (grid_k + 1) * h if grid_k + 1 < n_steps else t_end
        while breakpoints and breakpoints[0] <= t + eps_t:
            breakpoints.pop(0)
        target = nxt
        if breakpoints and breakpoints[0] < nxt - eps_t:
            target = breakpoints[0]

        u_new, d_end = rk4(t, u, target - t, k1)
        u_new = check(target, u_new, t)

        crossing = None
        for ri, rule in enumerate(rules):
            k = rule.target.index
            if armed[ri] and u[k] < rule.threshold <= u_new[k]:
                d1 = list(func(target, u_new, d_end if delayed else u_new))
                tc = _locate_crossing(t, u, k1, target, u_new, d1, k, rule.threshold, event_tol)
                if crossing is None or tc < crossing[0]:
                    crossing = (tc, ri)

        if crossing is None:
            t, u = target, u_new
            k1 = accept(t, u, d_end)
            if target == nxt:
                grid_k += 1
        else:
            tc, ri = crossing
            rule = rules[ri]
            k = rule.target.index
            u_pre, d_pre = rk4(t, u, tc - t, k1)
            u_pre = check(tc, u_pre, t)
            hist.append(tc, u_pre, list(func(tc, u_pre, d_pre if delayed else u_pre)))
            u_post = list(u_pre)
            u_post[k] = (1.0 - rule.fraction_removed) * u_pre[k]
            events.append(EventRecord(tc, rule.target, u_pre[k], u_post[k]))
            k1 = list(func(tc, u_post, lookup(tc, "right") if delayed else u_post))
            hist.append(tc, u_post, k1)
            armed[ri] = False
            if delayed:
                bisect.insort(breakpoints, tc + tau)
            t, u = tc, u_post

        for ri, rule in enumerate(rules):
            if not armed[ri] and u[rule.target.index] < rule.threshold:
                armed[ri] = True

    return Trajectory(
        times=np.array(hist.times),
        states=np.array(hist.states),
        derivatives=np.array(hist.derivs),
        events=events,
        tau=tau,
        h=h,
        history=tuple(float(v) for v in history),
        clamp_count=clamp_count,
        min_raw=min_raw,
    )


def _locate_crossing(t0, u0, d0, t1, u1, d1, k, level, tol):
    lo, hi = t0, t1
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        v = _hermite(mid, t0, t1, u0, u1, d0, d1)[k]
        if v < level:
            lo = mid
        else:
            hi = mid
    return hi


def model_rhs(params: ModelParams) -> RhsFunc:
    def f(t, u, ud):
        return _rhs_raw(u[0], u[1], ud[0], ud[1], params)
    return f


def integrate(params: ModelParams, history: HistorySpec, t_end: float = DEFAULT_T_END,
              h: float | None = None, rules: Sequence[EventRule] = ()) -> Trajectory:
    """Integrate the predator-prey model from a constant history."""
    traj = solve(model_rhs(params), params.tau, history.value, t_end, h, rules)
    traj.params = params
    return traj


def dense_eval(traj: Trajectory, t: float) -> tuple[float, ...]:
    """Solution value at time t (right-continuous at event times)."""
    if not (traj.t0 - traj.tau <= t <= traj.t_end):
        raise ValueError(f"t={t!r} outside [{traj.t0 - traj.tau!r}, {traj.t_end!r}]")
    if t < traj.t0:
        return traj.history
    times = traj.times
    i = int(np.searchsorted(times, t, side="right")) - 1
    if times[i] == t or i == len(times) - 1:
        return tuple(float(v) for v in traj.states[i])
    v = _hermite(t, times[i], times[i + 1], traj.states[i], traj.states[i + 1],
                 traj.derivatives[i], traj.derivatives[i + 1])
    return tuple(float(a) for a in v)


def write_trajectory_csv(traj: Trajectory, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "x", "y"])
        for t, (x, y) in zip(traj.times, traj.states):
            w.writerow([repr(float(t)), repr(float(x)), repr(float(y))])


def write_events_csv(traj: Trajectory, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "target", "before", "after"])
        for ev in traj.events:
            w.writerow([repr(ev.time), ev.target.value, repr(ev.value_before), repr(ev.value_after)])
