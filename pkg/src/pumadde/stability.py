"""Local stability of equilibria via the transcendental characteristic equation

    F(lambda) = lambda^2 + m lambda + n lambda e^{-lambda tau} + p + q e^{-lambda tau}

Crossing frequencies and critical delays follow the Cooke-Grossman analysis
of second-degree transcendental equations; an argument-principle root count
serves as an independent numerical check.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .model import Equilibrium, EquilibriumKind, ModelParams

DEADBAND = 1e-12
DEFAULT_J_MAX = 8
_COINCIDENT = 1e-9
_MAX_CROSSINGS = 10_000


class ContourError(RuntimeError):
    """The argument-principle contour kept passing through a root."""


class Direction(enum.Enum):
    DESTABILIZING = "destabilizing"
    STABILIZING = "stabilizing"


class Status(enum.Enum):
    ABSOLUTELY_STABLE = "AbsolutelyStable"
    GLOBALLY_STABLE_BOUNDARY = "GloballyStableBoundary"
    CONDITIONALLY_STABLE = "ConditionallyStable"
    UNSTABLE = "Unstable"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class Linearization:
    """Nonzero entries of x' = A x(t) + B x(t - tau) at an equilibrium.

    ``a12`` is the signed partial derivative of the prey equation with
    respect to predator density, i.e. ``-gamma u1^2/(a^2+u1^2)``.
    """

    a11: float
    a12: float
    a22: float
    b21: float
    b22: float


@dataclass(frozen=True)
class CharCoefficients:
    m: float
    n: float
    p: float
    q: float

    @property
    def gap_term(self) -> float:
        """2p + n^2 - m^2, the linear coefficient of the reduced quartic (negated)."""
        return 2 * self.p + self.n ** 2 - self.m ** 2


@dataclass(frozen=True)
class Crossing:
    omega: float
    taus: tuple[float, ...]
    direction: Direction
    theta: float
    arccos_theta: float
    arccos_mismatch: bool


@dataclass(frozen=True)
class CrossingSet:
    crossings: tuple[Crossing, ...] = ()

    def _get(self, d: Direction) -> Crossing | None:
        for c in self.crossings:
            if c.direction is d:
                return c
        return None

    @property
    def plus(self) -> Crossing | None:
        return self._get(Direction.DESTABILIZING)

    @property
    def minus(self) -> Crossing | None:
        return self._get(Direction.STABILIZING)

    @property
    def omega_plus(self) -> float | None:
        return self.plus.omega if self.plus else None

    @property
    def omega_minus(self) -> float | None:
        return self.minus.omega if self.minus else None

    @property
    def flagged(self) -> bool:
        return any(c.arccos_mismatch for c in self.crossings)

    def pairs(self):
        for c in self.crossings:
            for tau in c.taus:
                yield c.omega, tau, c.direction


@dataclass
class StabilityVerdict:
    status: Status
    hypothesis_trail: list[tuple[str, bool | None]] = field(default_factory=list)
    stable_windows: list[tuple[float, float]] = field(default_factory=list)
    crossings: CrossingSet = field(default_factory=CrossingSet)
    evidence: dict[float, int] = field(default_factory=dict)
    note: str = ""


# --------------------------------------------------------------------------
# linearization and coefficients

def linearize(params: ModelParams, eq: Equilibrium) -> Linearization:
    r, K, a, g, b, N = params.r, params.K, params.a, params.gamma, params.beta, params.N
    u1, u2 = eq.x, eq.y
    d = a * a + u1 * u1
    e = 2 * g * u1 * u2 * a * a / (d * d)
    ricker = math.exp(-u2 / N)
    return Linearization(
        a11=r * (1 - 2 * u1 / K) - e,
        a12=-g * u1 * u1 / d,
        a22=-b,
        b21=e * ricker,
        b22=g * u1 * u1 / d * (1 - u2 / N) * ricker,
    )


def char_coefficients(lin: Linearization) -> CharCoefficients:
    return CharCoefficients(
        m=-(lin.a11 + lin.a22),
        n=-lin.b22,
        p=lin.a11 * lin.a22,
        q=lin.b22 * lin.a11 - lin.a12 * lin.b21,
    )


def closed_form_coefficients(params: ModelParams, eq: Equilibrium) -> CharCoefficients:
    """Closed-form m, n, p, q at a positive equilibrium, written with the
    equilibrium identities substituted (q in the reduced form that drops the cross term)."""
    r, K, a, b, N = params.r, params.K, params.a, params.beta, params.N
    x, y = eq.x, eq.y
    m = r * (1 - x / K) * (2 * a * a / (a * a + x * x) - 1) + b + r * x / K
    return CharCoefficients(
        m=m,
        n=b * (y / N - 1),
        p=-b * (b - m),
        q=-b * r * (1 - 2 * x / K),
    )


def char_residual(c: CharCoefficients, lam: complex, tau: float) -> complex:
    e = np.exp(-lam * tau)
    return lam * lam + c.m * lam + c.n * lam * e + c.p + c.q * e


def char_derivative(c: CharCoefficients, lam: complex, tau: float) -> complex:
    """dF/dlambda."""
    e = np.exp(-lam * tau)
    return 2 * lam + c.m + (c.n - tau * (c.n * lam + c.q)) * e


# --------------------------------------------------------------------------
# purely imaginary roots

def omega_candidates(c: CharCoefficients) -> tuple[float, ...]:
    """Positive omega with F(i omega) = 0 for some tau, largest first.

    Roots of omega^4 + (m^2 - n^2 - 2p) omega^2 + p^2 - q^2 = 0.
    """
    s = c.gap_term
    disc = s * s - 4 * (c.p ** 2 - c.q ** 2)
    if disc < 0:
        return ()
    root = math.sqrt(disc)
    out = []
    for w2 in (0.5 * (s + root), 0.5 * (s - root)):
        if w2 > 0:
            out.append(math.sqrt(w2))
    if len(out) == 2 and out[0] == out[1]:
        out = out[:1]
    return tuple(out)


def _crossing_angles(c: CharCoefficients, omega: float) -> tuple[float, float]:
    # e^{-i w tau} = -(-w^2 + i m w + p) / (i n w + q)
    z = -complex(c.p - omega * omega, c.m * omega) / complex(c.q, c.n * omega)
    z /= abs(z)
    theta = math.atan2(-z.imag, z.real) % (2 * math.pi)
    denom = c.q ** 2 + c.n ** 2 * omega ** 2
    cos_val = (c.q * (omega ** 2 - c.p) - c.m * c.n * omega ** 2) / denom
    return theta, math.acos(max(-1.0, min(1.0, cos_val)))


def crossing_set(c: CharCoefficients, j_max: int = DEFAULT_J_MAX) -> CrossingSet:
    """Critical delays tau_j = (theta + 2 pi j)/omega, j < j_max, per crossing frequency.

    theta is taken from the full complex value of e^{-i omega tau}; the
    arccos-only angle is kept alongside and a mismatch is flagged.
    """
    if j_max < 1:
        raise ValueError("j_max must be >= 1")
    if c.n == 0 and c.q == 0:
        return CrossingSet()
    omegas = omega_candidates(c)
    out = []
    for k, w in enumerate(omegas):
        theta, acos_theta = _crossing_angles(c, w)
        taus = tuple((theta + 2 * math.pi * j) / w for j in range(j_max))
        mismatch = abs(theta - acos_theta) > 1e-9 * max(1.0, theta)
        out.append(Crossing(
            omega=w,
            taus=taus,
            direction=Direction.DESTABILIZING if k == 0 else Direction.STABILIZING,
            theta=theta,
            arccos_theta=acos_theta,
            arccos_mismatch=mismatch,
        ))
    return CrossingSet(tuple(out))


def crossing_direction_sign(c: CharCoefficients, omega: float) -> float:
    """sign of d Re(lambda)/d tau at lambda = i omega."""
    return math.copysign(1.0, c.m ** 2 - c.n ** 2 - 2 * c.p + 2 * omega ** 2)


# --------------------------------------------------------------------------
# argument-principle oracle

def default_search_radius(c: CharCoefficients) -> float:
    return 10.0 * (1 + abs(c.m) + abs(c.n) + math.sqrt(abs(c.p) + abs(c.q)))


def _contour(left: float, R: float, tau: float) -> np.ndarray:
    vert = max(1024, int(math.ceil(2 * R * max(tau, 1.0) * 8 / math.pi)))
    horiz = 1024
    bottom = np.linspace(left, R, horiz, endpoint=False) - 1j * R
    right = R + 1j * np.linspace(-R, R, vert, endpoint=False)
    top = np.linspace(R, left, horiz, endpoint=False) + 1j * R
    leftedge = left + 1j * np.linspace(R, -R, vert, endpoint=False)
    pts = np.concatenate([bottom, right, top, leftedge])
    return np.append(pts, pts[0])


def _winding(c: CharCoefficients, tau: float, left: float, R: float) -> int | None:
    pts = _contour(left, R, tau)
    vals = char_residual(c, pts, tau)
    for _ in range(60):
        if np.min(np.abs(vals)) < 1e-9:
            return None
        dphi = np.angle(vals[1:] / vals[:-1])
        bad = np.abs(dphi) > math.pi / 2
        if not bad.any():
            w = dphi.sum() / (2 * math.pi)
            return int(round(w))
        idx = np.nonzero(bad)[0]
        if len(pts) + len(idx) > 4_000_000:
            return None
        mids = 0.5 * (pts[idx] + pts[idx + 1])
        pts = np.insert(pts, idx + 1, mids)
        vals = np.insert(vals, idx + 1, char_residual(c, mids, tau))
    return None


def count_unstable_roots(c: CharCoefficients, tau: float, search_radius: float | None = None) -> int:
    """Number of roots of F with positive real part (with multiplicity).

    Winding number of F around [0, R] x [-R, R].  If the contour passes
    within 1e-9 of a root, both the radius and the left edge are nudged by
    1e-6 and the count is retried (up to 5 times).
    """
    R = default_search_radius(c) if search_radius is None else float(search_radius)
    for attempt in range(6):
        nudge = attempt * 1e-6
        w = _winding(c, tau, nudge, R + nudge)
        if w is not None:
            return w
    raise ContourError(f"contour failed for {c} at tau={tau!r}")


# --------------------------------------------------------------------------
# classification

def _gt(lhs: float, rhs: float) -> bool | None:
    """lhs > rhs with a relative dead-band; None when too close to call."""
    if abs(lhs - rhs) <= DEADBAND * max(1.0, abs(lhs), abs(rhs)):
        return None
    return lhs > rhs


def _windows(cs: CrossingSet, j_max: int) -> tuple[list[tuple[float, float]], str]:
    plus, minus = cs.plus, cs.minus
    if plus is None or minus is None:
        return [], "missing crossing frequency"
    wp, wm = plus.omega, minus.omega
    # past this delay the destabilizing crossings outnumber the stabilizing ones for good
    tau_bound = (2 * math.pi + plus.theta - minus.theta) / (wp - wm)
    n_plus = max(j_max, int(math.ceil(tau_bound * wp / (2 * math.pi))) + 2)
    n_minus = max(j_max, int(math.ceil(tau_bound * wm / (2 * math.pi))) + 2)
    if max(n_plus, n_minus) > _MAX_CROSSINGS:
        return [], "crossing frequencies too close to resolve"
    events = [((plus.theta + 2 * math.pi * j) / wp, 1) for j in range(n_plus)]
    events += [((minus.theta + 2 * math.pi * j) / wm, -1) for j in range(n_minus)]
    events.sort()

    windows = []
    count, start, prev = 0, 0.0, -math.inf
    for tau, d in events:
        if tau - prev <= _COINCIDENT:
            return [], "coincident crossings"
        prev = tau
        if tau > tau_bound:
            break
        if count == 0:
            if d < 0:
                return [], "stabilizing crossing with no unstable roots"
            windows.append((start, tau))
        count += 2 * d
        if count == 0:
            start = tau
    if count == 0:
        return [], "unstable-root count never stays positive"
    return windows, ""


def classify_equilibrium(params: ModelParams, eq: Equilibrium, tau_ref: float | None = None,
                         j_max: int = DEFAULT_J_MAX) -> StabilityVerdict:
    """Stability verdict for one equilibrium, with the predicates that led to it."""
    tau_ref = params.tau if tau_ref is None else tau_ref
    lin = linearize(params, eq)
    c = char_coefficients(lin)
    trail: list[tuple[str, bool | None]] = []

    def evidence():
        return {tau_ref: count_unstable_roots(c, tau_ref)}

    if eq.kind is EquilibriumKind.ORIGIN:
        trail.append(("origin: a11 = r > 0", params.r > 0))
        return StabilityVerdict(Status.UNSTABLE, trail)

    if eq.kind is EquilibriumKind.BOUNDARY:
        K2 = params.K ** 2
        sat = params.gamma * K2 / (params.a ** 2 + K2)
        b_gt_g = _gt(params.beta, params.gamma)
        trail.append(("beta > gamma", b_gt_g))
        if b_gt_g:
            return StabilityVerdict(Status.GLOBALLY_STABLE_BOUNDARY, trail)
        h1 = _gt(params.beta, sat)
        trail.append(("H1: beta > gamma K^2/(a^2+K^2)", h1))
        if h1:
            return StabilityVerdict(Status.ABSOLUTELY_STABLE, trail)
        return StabilityVerdict(Status.INCONCLUSIVE, trail, evidence=evidence(),
                                note="boundary: neither beta > gamma nor H1")

    r, K, a, b, N = params.r, params.K, params.a, params.beta, params.N
    x, y = eq.x, eq.y
    d = a * a + x * x
    h2 = _gt((r * x / K + b * y / N) / (r * (1 - x / K)), 1 - 2 * a * a / d)
    h3 = _gt(params.gamma * x * y * a * a / (d * d), r * (1 - 2 * x / K))
    trail += [("H2", h2), ("H3", h3)]
    return classify_coefficients(c, tau_ref, j_max, trail)


def classify_coefficients(c: CharCoefficients, tau_ref: float, j_max: int = DEFAULT_J_MAX,
                          trail: list | None = None) -> StabilityVerdict:
    """Verdict from m, n, p, q alone (the positive-equilibrium branch).

    Absolutely stable when m + n > 0, p + q > 0, p^2 > q^2 and
    2p + n^2 - m^2 < 0.  With the last quantity above 2 sqrt(p^2 - q^2)
    instead, both crossing frequencies exist and the stable delay windows
    are assembled from the ordered crossings.
    """
    trail = list(trail or [])
    a1 = _gt(c.m + c.n, 0.0)
    a2 = _gt(c.p + c.q, 0.0)
    pq = _gt(c.p ** 2, c.q ** 2)
    s = c.gap_term
    trail += [("A1: m + n > 0", a1), ("A2: p + q > 0", a2), ("p^2 - q^2 > 0", pq)]
    cs = crossing_set(c, j_max)

    def evidence():
        return {tau_ref: count_unstable_roots(c, tau_ref)}

    if a1 and a2 and pq:
        neg = _gt(0.0, s)
        trail.append(("A3 / case a: 2p + n^2 - m^2 < 0", neg))
        if neg:
            return StabilityVerdict(Status.ABSOLUTELY_STABLE, trail, crossings=cs)
        if neg is False:
            case_b = _gt(s, 2 * math.sqrt(c.p ** 2 - c.q ** 2))
            trail.append(("A5 / case b: 2p + n^2 - m^2 > 2 sqrt(p^2 - q^2)", case_b))
            if case_b:
                windows, why = _windows(cs, j_max)
                if windows:
                    return StabilityVerdict(Status.CONDITIONALLY_STABLE, trail,
                                            stable_windows=windows, crossings=cs)
                return StabilityVerdict(Status.INCONCLUSIVE, trail, crossings=cs,
                                        evidence=evidence(), note=why)
    return StabilityVerdict(Status.INCONCLUSIVE, trail, crossings=cs, evidence=evidence(),
                            note="outside the absolute/conditional stability criteria")


def verdict_record(eq: Equilibrium, v: StabilityVerdict) -> dict:
    """Machine-readable form of a verdict."""
    return {
        "equilibrium": {"x": eq.x, "y": eq.y, "kind": eq.kind.value},
        "status": v.status.value,
        "trail": [{"predicate": k, "value": val} for k, val in v.hypothesis_trail],
        "stable_windows": [[lo, hi] for lo, hi in v.stable_windows],
        "crossings": [
            {"omega": c.omega, "direction": c.direction.value, "taus": list(c.taus),
             "arccos_mismatch": c.arccos_mismatch}
            for c in v.crossings.crossings
        ],
        "evidence": {repr(t): n for t, n in v.evidence.items()},
        "note": v.note,
    }


def format_verdict(eq: Equilibrium, v: StabilityVerdict) -> str:
    lines = [f"equilibrium ({eq.x:.6g}, {eq.y:.6g}) [{eq.kind.value}]: {v.status.value}"]
    for k, val in v.hypothesis_trail:
        shown = "undecided" if val is None else str(val).lower()
        lines.append(f"  {k}: {shown}")
    for lo, hi in v.stable_windows:
        lines.append(f"  stable for tau in [{lo:.6g}, {hi:.6g})")
    for c in v.crossings.crossings:
        taus = ", ".join(f"{t:.6g}" for t in c.taus)
        flag = " (arccos form differs)" if c.arccos_mismatch else ""
        lines.append(f"  omega={c.omega:.6g} {c.direction.value}{flag}: tau_j = {taus}")
    for t, n in v.evidence.items():
        lines.append(f"  unstable roots at tau={t:.6g}: {n}")
    if v.note:
        lines.append(f"  note: {v.note}")
    return "\n".join(lines)
