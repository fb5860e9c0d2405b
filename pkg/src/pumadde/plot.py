"""Dependency-free SVG time-series plot of a trajectory."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ddesolve import Trajectory

LOG_FLOOR = 1e-6
_W, _H = 800, 420
_LEFT, _RIGHT, _TOP, _BOTTOM = 70, 70, 30, 50
PREY_COLOR = "#1f77b4"
PRED_COLOR = "#d62728"


@dataclass(frozen=True)
class PlotOptions:
    log_prey: bool = False
    title: str = ""
    max_points: int = 4000


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _label(v: float) -> str:
    return f"{v:.6g}"


def nice_ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    """Round-numbered linear ticks covering [lo, hi]."""
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((s * mag for s in (1, 2, 5, 10) if s * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step - 1e-9) * step
    ticks = []
    k = 0
    while start + k * step <= hi + 1e-9 * step:
        ticks.append(round(start + k * step, 12))
        k += 1
    return ticks


def decade_ticks(lo: float, hi: float) -> list[float]:
    """Powers of ten inside [lo, hi]."""
    a = math.ceil(math.log10(lo) - 1e-12)
    b = math.floor(math.log10(hi) + 1e-12)
    return [10.0 ** k for k in range(a, b + 1)]


def _thin(t: np.ndarray, v: np.ndarray, max_points: int):
    if len(t) <= max_points:
        return t, v
    idx = np.unique(np.linspace(0, len(t) - 1, max_points).round().astype(int))
    return t[idx], v[idx]


class _Axis:
    def __init__(self, lo, hi, pix_lo, pix_hi, log=False):
        self.log = log
        if log:
            lo, hi = math.log10(lo), math.log10(hi)
        if hi <= lo:
            pad = abs(lo) * 0.05 or 1.0
            lo, hi = lo - pad, hi + pad
        self.lo, self.hi, self.p0, self.p1 = lo, hi, pix_lo, pix_hi

    def __call__(self, v):
        v = np.log10(np.maximum(v, LOG_FLOOR)) if self.log else np.asarray(v, dtype=float)
        return self.p0 + (v - self.lo) / (self.hi - self.lo) * (self.p1 - self.p0)


def render_svg(traj: Trajectory, options: PlotOptions = PlotOptions()) -> str:
    """SVG document with prey (left axis) and predator (right axis) against time."""
    if traj is None or len(traj.times) < 2:
        raise ValueError("trajectory needs at least two nodes to plot")
    t = traj.times
    x, y = traj.x, traj.y
    x0, x1 = _LEFT, _W - _RIGHT
    y0, y1 = _H - _BOTTOM, _TOP
    tx = _Axis(float(t[0]), float(t[-1]), x0, x1)

    if options.log_prey:
        xc = np.maximum(x, LOG_FLOOR)
        prey_ax = _Axis(float(xc.min()), float(xc.max()), y0, y1, log=True)
        lo_d, hi_d = 10 ** prey_ax.lo, 10 ** prey_ax.hi
        prey_ticks = decade_ticks(lo_d, hi_d) or [lo_d]
    else:
        prey_ax = _Axis(0.0, float(x.max()), y0, y1)
        prey_ticks = nice_ticks(prey_ax.lo, prey_ax.hi)
    pred_ax = _Axis(0.0, float(y.max()), y0, y1)
    pred_ticks = nice_ticks(pred_ax.lo, pred_ax.hi)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}" font-family="sans-serif" font-size="11">',
        f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="white"/>',
        f'<g id="axes" stroke="black" fill="none">'
        f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}"/>'
        f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}"/>'
        f'<line x1="{x1}" y1="{y0}" x2="{x1}" y2="{y1}"/></g>',
    ]
    if options.title:
        out.append(f'<text x="{_W / 2}" y="18" text-anchor="middle">{options.title}</text>')

    ticks = ['<g id="ticks">']
    for v in nice_ticks(float(t[0]), float(t[-1])):
        px = _fmt(float(tx(v)))
        ticks.append(f'<line x1="{px}" y1="{y0}" x2="{px}" y2="{y0 + 5}" stroke="black"/>'
                     f'<text class="t-tick" x="{px}" y="{y0 + 18}" '
                     f'text-anchor="middle">{_label(v)}</text>')
    for v in prey_ticks:
        py = _fmt(float(prey_ax(v)))
        ticks.append(f'<line x1="{x0 - 5}" y1="{py}" x2="{x0}" y2="{py}" stroke="black"/>'
                     f'<text class="prey-tick" x="{x0 - 8}" y="{py}" text-anchor="end" '
                     f'dominant-baseline="middle">{_label(v)}</text>')
    for v in pred_ticks:
        py = _fmt(float(pred_ax(v)))
        ticks.append(f'<line x1="{x1}" y1="{py}" x2="{x1 + 5}" y2="{py}" stroke="black"/>'
                     f'<text class="predator-tick" x="{x1 + 8}" y="{py}" '
                     f'dominant-baseline="middle">{_label(v)}</text>')
    ticks.append("</g>")
    out += ticks

    prey_scale = "log10 prey" if options.log_prey else "prey"
    out.append(f'<text x="{(x0 + x1) / 2}" y="{_H - 10}" text-anchor="middle">time</text>')
    out.append(f'<text x="14" y="{(y0 + y1) / 2}" transform="rotate(-90 14 {(y0 + y1) / 2})" '
               f'text-anchor="middle">{prey_scale}</text>')

    for name, vals, ax, color in (("prey", x, prey_ax, PREY_COLOR),
                                  ("predator", y, pred_ax, PRED_COLOR)):
        tt, vv = _thin(t, vals, options.max_points)
        pts = " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in zip(tx(tt), ax(vv)))
        out.append(f'<polyline class="{name}" fill="none" stroke="{color}" '
                   f'stroke-width="1.2" points="{pts}"/>')

    out.append('<g id="events">')
    for ev in traj.events:
        px = _fmt(float(tx(ev.time)))
        color = PREY_COLOR if ev.target.value == "prey" else PRED_COLOR
        out.append(f'<line class="event" x1="{px}" y1="{y0}" x2="{px}" y2="{y1}" '
                   f'stroke="{color}" stroke-dasharray="2,3" stroke-opacity="0.5"/>')
    out.append("</g>")

    lx = x0 + 10
    out.append('<g id="legend">'
               f'<line x1="{lx}" y1="{y1 + 10}" x2="{lx + 20}" y2="{y1 + 10}" '
               f'stroke="{PREY_COLOR}" stroke-width="2"/>'
               f'<text x="{lx + 25}" y="{y1 + 14}">prey x</text>'
               f'<line x1="{lx}" y1="{y1 + 26}" x2="{lx + 20}" y2="{y1 + 26}" '
               f'stroke="{PRED_COLOR}" stroke-width="2"/>'
               f'<text x="{lx + 25}" y="{y1 + 30}">predator y</text></g>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
