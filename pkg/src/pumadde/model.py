"""Delayed Gause-type predator-prey model with Holling III predation and
Ricker recruitment.

    x'(t) = r (1 - x/K) x - p(x) y
    y'(t) = -beta y + p(x(t - tau)) y(t - tau) exp(-y(t - tau) / N)

with p(x) = gamma x^2 / (a^2 + x^2).  Also holds the equilibrium finder.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

# scan resolution for the positive-equilibrium root search
SCAN_INTERVALS = 2000
_BISECT_TOL = 1e-12
_MERGE_REL = 1e-8
_TANGENT_TOL = 1e-6


@dataclass(frozen=True)
class ModelParams:
    """Ecological parameters of the model.

    r     : prey reproduction rate
    K     : prey carrying capacity
    a     : half-saturation constant of the functional response
    gamma : maximum per-capita consumption rate
    beta  : predator mortality rate
    N     : optimal predator reproductive density
    tau   : maturation delay (may be zero)
    """

    r: float
    K: float
    a: float
    gamma: float
    beta: float
    N: float
    tau: float = 0.0

    def __post_init__(self):
        for name in ("r", "K", "a", "gamma", "beta", "N", "tau"):
            object.__setattr__(self, name, float(getattr(self, name)))
        for name in ("r", "K", "a", "gamma", "beta", "N"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be finite and > 0, got {v!r}")
        if not (math.isfinite(self.tau) and self.tau >= 0):
            raise ValueError(f"tau must be finite and >= 0, got {self.tau!r}")

    def replace(self, **changes) -> "ModelParams":
        d = {k: getattr(self, k) for k in ("r", "K", "a", "gamma", "beta", "N", "tau")}
        d.update(changes)
        return ModelParams(**d)


@dataclass(frozen=True)
class State:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"state must be finite, got ({self.x}, {self.y})")
        if self.x < 0 or self.y < 0:
            raise ValueError(f"state must be non-negative, got ({self.x}, {self.y})")

    def as_tuple(self) -> tuple[float, float]:
        return (self.x, self.y)


class EquilibriumKind(enum.Enum):
    ORIGIN = "origin"
    BOUNDARY = "boundary"
    POSITIVE = "positive"


@dataclass(frozen=True)
class Equilibrium:
    state: State
    kind: EquilibriumKind
    residual: float
    tangential: bool = field(default=False)

    @property
    def x(self) -> float:
        return self.state.x

    @property
    def y(self) -> float:
        return self.state.y


def functional_response(x: float, params: ModelParams) -> float:
    """Holling type III consumption rate gamma x^2 / (a^2 + x^2)."""
    if x < 0:
        raise ValueError(f"prey density must be >= 0, got {x!r}")
    x2 = x * x
    return params.gamma * x2 / (params.a * params.a + x2)


def _rhs_raw(x, y, xd, yd, params: ModelParams):
    # no domain checks: RK stages may dip a hair below zero
    a2 = params.a * params.a
    px = params.gamma * x * x / (a2 + x * x)
    pxd = params.gamma * xd * xd / (a2 + xd * xd)
    dx = params.r * (1.0 - x / params.K) * x - px * y
    dy = -params.beta * y + pxd * yd * math.exp(-yd / params.N)
    return dx, dy


def rhs(current: State, delayed: State, params: ModelParams) -> tuple[float, float]:
    """Right-hand side (dx/dt, dy/dt) given the current and the delayed state."""
    return _rhs_raw(current.x, current.y, delayed.x, delayed.y, params)


def equilibrium_residual(x: float, y: float, params: ModelParams) -> float:
    """Max-norm of the steady-state system at (x, y)."""
    return max(abs(v) for v in _rhs_raw(x, y, x, y, params))


def residual_scale(params: ModelParams) -> float:
    return max(1.0, params.r * params.K)


def positive_existence_condition(params: ModelParams) -> bool:
    """True iff (gamma/beta) K^2/(a^2+K^2) > 1, i.e. a positive equilibrium exists."""
    K2 = params.K * params.K
    return params.gamma / params.beta * K2 / (params.a * params.a + K2) > 1.0


def admissible_interval(params: ModelParams) -> tuple[float, float]:
    """Interval (x_low, K) on which the predator-nullcline logarithm is positive."""
    g, b = params.gamma, params.beta
    if g <= b * (1 + 1e-14):
        return 1e-12, params.K
    return params.a * math.sqrt(b / (g - b)), params.K


def predator_curve(x: float, params: ModelParams) -> float:
    """y on the prey nullcline: (r/gamma)(1 - x/K)(a^2 + x^2)/x."""
    return params.r / params.gamma * (1.0 - x / params.K) * (params.a ** 2 + x * x) / x


def _gap(x, params: ModelParams):
    a2 = params.a * params.a
    first = params.r / params.gamma * (1.0 - x / params.K) * (a2 + x * x) / x
    return first - params.N * np.log(params.gamma / params.beta * x * x / (a2 + x * x))


def equilibrium_gap(x: float, params: ModelParams) -> float:
    """Difference between the two nullcline curves at prey density x.

    Zeros are the prey coordinates of positive equilibria.  Defined on the
    closed admissible interval [x_low, K]; positive at x_low and negative at K
    whenever a positive equilibrium exists.
    """
    if not positive_existence_condition(params):
        raise ValueError("no positive equilibrium can exist for these parameters")
    lo, hi = admissible_interval(params)
    if not (lo <= x <= hi):
        raise ValueError(f"x={x!r} outside admissible interval [{lo!r}, {hi!r}]")
    return float(_gap(x, params))


def _bisect(f, lo, hi, flo):
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0 or abs(fm) <= _BISECT_TOL or mid in (lo, hi):
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _scan_grid(lo: float, hi: float) -> np.ndarray:
    uniform = np.linspace(lo, hi, SCAN_INTERVALS + 1)
    # log-spaced refinement resolves roots crowded near x_low
    geometric = np.geomspace(lo, hi, SCAN_INTERVALS + 1)
    return np.unique(np.concatenate([uniform, geometric]))


def _positive_roots(params: ModelParams) -> list[tuple[float, bool]]:
    lo, hi = admissible_interval(params)
    xs = _scan_grid(lo, hi)
    hs = _gap(xs, params)
    hs[0] = float(_gap(lo, params))
    f = lambda x: float(_gap(x, params))  # noqa: E731

    roots: list[tuple[float, bool]] = []
    for i in range(len(xs) - 1):
        h0, h1 = hs[i], hs[i + 1]
        if h0 == 0.0:
            if 0 < i:
                roots.append((float(xs[i]), False))
            continue
        if (h0 > 0) != (h1 > 0) and h1 != 0.0:
            roots.append((_bisect(f, float(xs[i]), float(xs[i + 1]), float(h0)), False))
        elif h1 == 0.0 and i + 1 < len(xs) - 1:
            roots.append((float(xs[i + 1]), False))

    # tangential roots: |h| dips near zero at a local minimum without a sign change
    absh = np.abs(hs)
    for i in range(1, len(xs) - 1):
        if absh[i] < _TANGENT_TOL and absh[i] <= absh[i - 1] and absh[i] <= absh[i + 1]:
            if (hs[i - 1] > 0) != (hs[i + 1] > 0):
                continue
            x_t = _golden_min(lambda x: abs(f(x)), float(xs[i - 1]), float(xs[i + 1]))
            if abs(f(x_t)) <= _TANGENT_TOL * 1e-4:
                roots.append((x_t, True))

    roots.sort()
    merged: list[tuple[float, bool]] = []
    for x, tang in roots:
        if merged and abs(x - merged[-1][0]) <= _MERGE_REL * max(abs(x), 1e-300):
            continue
        merged.append((x, tang))
    return merged


def _golden_min(f, lo, hi, iters=200):
    g = (math.sqrt(5) - 1) / 2
    c, d = hi - g * (hi - lo), lo + g * (hi - lo)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc < fd:
            hi, d, fd = d, c, fc
            c = hi - g * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + g * (hi - lo)
            fd = f(d)
        if hi - lo <= 1e-15 * max(1.0, abs(hi)):
            break
    return 0.5 * (lo + hi)


def find_equilibria(params: ModelParams) -> list[Equilibrium]:
    """All equilibria sorted by prey density.

    The origin and (K, 0) are always present.  Positive equilibria come from
    a sign-change scan of :func:`equilibrium_gap` refined by bisection, with the
    predator coordinate recovered from the prey nullcline.
    """
    eqs = [
        Equilibrium(State(0.0, 0.0), EquilibriumKind.ORIGIN, 0.0),
        Equilibrium(State(params.K, 0.0), EquilibriumKind.BOUNDARY,
                    equilibrium_residual(params.K, 0.0, params)),
    ]
    if positive_existence_condition(params):
        for x, tang in _positive_roots(params):
            y = predator_curve(x, params)
            if not (0 < x < params.K and y > 0):
                continue
            eqs.append(Equilibrium(State(x, y), EquilibriumKind.POSITIVE,
                                   equilibrium_residual(x, y, params), tangential=tang))
    eqs.sort(key=lambda e: e.x)
    return eqs
