"""JSON run configuration: parsing with key-path diagnostics and serialization.

Layout (every section except ``model`` is optional; ``model`` may be left
out only when a ``grid`` section is present)::

    {
      "model":      {"r": .., "K": .., "a": .., "gamma": .., "beta": .., "N": .., "tau": 0},
      "simulation": {"history": [x, y], "t_end": 1000, "step": null},
      "scenario":   {"rules": [{"target": "prey", "threshold": 150, "fraction_removed": 0.5}]},
      "grid":       {"r": [..], "K": [..], "a": [..], "gamma": [..], "beta": [..], "N": [..],
                     "tau": 27, "history": null, "t_end": 1000, "step": null,
                     "eps_extinct": 0.001, "osc_rel": 0.1, "workers": 1},
      "stability":  {"tau_ref": null, "j_max": 8},
      "output":     {"dir": null, "svg": false, "log_prey": false}
    }
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .ddesolve import DEFAULT_T_END, EventRule, Target
from .model import ModelParams
from .scenarios import EPS_EXTINCT, OSC_REL, SWEPT, DEFAULT_SWEEP, GridSpec
from .stability import DEFAULT_J_MAX

MODEL_KEYS = ("r", "K", "a", "gamma", "beta", "N", "tau")


class ConfigError(ValueError):
    """Invalid configuration; the message starts with the offending key path."""


@dataclass(frozen=True)
class RunConfig:
    model: ModelParams | None = None
    history: tuple[float, float] | None = None
    t_end: float = DEFAULT_T_END
    step: float | None = None
    rules: tuple[EventRule, ...] = ()
    grid: GridSpec | None = None
    tau_ref: float | None = None
    j_max: int = DEFAULT_J_MAX
    out_dir: str | None = None
    svg: bool = False
    log_prey: bool = False

    def require_model(self) -> ModelParams:
        if self.model is None:
            raise ConfigError("model: section is required for this command")
        return self.model

    def initial_history(self) -> tuple[float, float]:
        if self.history is not None:
            return self.history
        return (self.require_model().K / 2, 1.0)


# -- typed field readers ---------------------------------------------------

def _section(doc: dict, name: str, allowed: tuple[str, ...]) -> dict:
    sec = doc.get(name, {})
    if not isinstance(sec, dict):
        raise ConfigError(f"{name}: expected an object")
    for key in sec:
        if key not in allowed:
            raise ConfigError(f"{name}.{key}: unknown key")
    return sec


def _number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}: expected a number, got {type(value).__name__}")
    v = float(value)
    if not math.isfinite(v):
        raise ConfigError(f"{path}: must be finite")
    return v


def _positive(value, path: str) -> float:
    v = _number(value, path)
    if v <= 0:
        raise ConfigError(f"{path}: must be > 0, got {v!r}")
    return v


def _nonneg(value, path: str) -> float:
    v = _number(value, path)
    if v < 0:
        raise ConfigError(f"{path}: must be >= 0, got {v!r}")
    return v


def _optional(value, path: str, reader):
    return None if value is None else reader(value, path)


def _bool(value, path: str) -> bool:
    if not isinstance(value, bool):
        raise ConfigError(f"{path}: expected true or false")
    return value


def _int(value, path: str, low: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{path}: expected an integer")
    if value < low:
        raise ConfigError(f"{path}: must be >= {low}, got {value}")
    return value


def _pair(value, path: str) -> tuple[float, float]:
    if not isinstance(value, list) or len(value) != 2:
        raise ConfigError(f"{path}: expected [prey, predator]")
    return (_nonneg(value[0], f"{path}[0]"), _nonneg(value[1], f"{path}[1]"))


def _positive_list(value, path: str) -> tuple[float, ...]:
    if not isinstance(value, list) or not value:
        raise ConfigError(f"{path}: expected a non-empty list of numbers")
    return tuple(_positive(v, f"{path}[{i}]") for i, v in enumerate(value))


def _rule(value, path: str) -> EventRule:
    if not isinstance(value, dict):
        raise ConfigError(f"{path}: expected an object")
    for key in value:
        if key not in ("target", "threshold", "fraction_removed"):
            raise ConfigError(f"{path}.{key}: unknown key")
    for key in ("target", "threshold", "fraction_removed"):
        if key not in value:
            raise ConfigError(f"{path}.{key}: missing required key")
    target = value["target"]
    if target not in [t.value for t in Target]:
        raise ConfigError(f"{path}.target: expected 'prey' or 'predator', got {target!r}")
    thr = _positive(value["threshold"], f"{path}.threshold")
    frac = _number(value["fraction_removed"], f"{path}.fraction_removed")
    if not 0 < frac < 1:
        raise ConfigError(f"{path}.fraction_removed: must lie in (0, 1), got {frac!r}")
    return EventRule(Target(target), thr, frac)


# -- parse ------------------------------------------------------------------

def parse_config(text: str) -> RunConfig:
    """Validate a JSON document and build a :class:`RunConfig`."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"<document>: not valid JSON ({exc.msg} at line {exc.lineno})") from None
    if not isinstance(doc, dict):
        raise ConfigError("<document>: expected a top-level object")
    sections = ("model", "simulation", "scenario", "grid", "stability", "output")
    for key in doc:
        if key not in sections:
            raise ConfigError(f"{key}: unknown key")

    model = None
    if "model" in doc:
        m = _section(doc, "model", MODEL_KEYS)
        vals = {}
        for key in MODEL_KEYS[:-1]:
            if key not in m:
                raise ConfigError(f"model.{key}: missing required key")
            vals[key] = _positive(m[key], f"model.{key}")
        vals["tau"] = _nonneg(m.get("tau", 0.0), "model.tau")
        model = ModelParams(**vals)
    elif "grid" not in doc:
        raise ConfigError("model: missing required section")

    sim = _section(doc, "simulation", ("history", "t_end", "step"))
    history = _optional(sim.get("history"), "simulation.history", _pair)
    t_end = _positive(sim.get("t_end", DEFAULT_T_END), "simulation.t_end")
    step = _optional(sim.get("step"), "simulation.step", _positive)

    scen = _section(doc, "scenario", ("rules",))
    raw_rules = scen.get("rules", [])
    if not isinstance(raw_rules, list):
        raise ConfigError("scenario.rules: expected a list")
    rules = tuple(_rule(r, f"scenario.rules[{i}]") for i, r in enumerate(raw_rules))

    grid = None
    if "grid" in doc:
        g = _section(doc, "grid", SWEPT + ("tau", "history", "t_end", "step", "eps_extinct",
                                           "osc_rel", "workers"))
        lists = {k: _positive_list(g[k], f"grid.{k}") if k in g else DEFAULT_SWEEP[k] for k in SWEPT}
        default_tau = model.tau if model is not None else 27.0
        grid = GridSpec(
            **lists,
            tau=_nonneg(g.get("tau", default_tau), "grid.tau"),
            history=_optional(g.get("history"), "grid.history", _pair),
            t_end=_positive(g.get("t_end", DEFAULT_T_END), "grid.t_end"),
            h=_optional(g.get("step"), "grid.step", _positive),
            eps_extinct=_positive(g.get("eps_extinct", EPS_EXTINCT), "grid.eps_extinct"),
            osc_rel=_positive(g.get("osc_rel", OSC_REL), "grid.osc_rel"),
            workers=_int(g.get("workers", 1), "grid.workers", 1),
        )

    stab = _section(doc, "stability", ("tau_ref", "j_max"))
    tau_ref = _optional(stab.get("tau_ref"), "stability.tau_ref", _nonneg)
    j_max = _int(stab.get("j_max", DEFAULT_J_MAX), "stability.j_max", 1)

    out = _section(doc, "output", ("dir", "svg", "log_prey"))
    out_dir = out.get("dir")
    if out_dir is not None and not isinstance(out_dir, str):
        raise ConfigError("output.dir: expected a string")

    return RunConfig(model=model, history=history, t_end=t_end, step=step, rules=rules,
                     grid=grid, tau_ref=tau_ref, j_max=j_max, out_dir=out_dir,
                     svg=_bool(out.get("svg", False), "output.svg"),
                     log_prey=_bool(out.get("log_prey", False), "output.log_prey"))


# -- serialize --------------------------------------------------------------

def config_to_dict(cfg: RunConfig) -> dict:
    doc: dict = {}
    if cfg.model is not None:
        doc["model"] = {k: getattr(cfg.model, k) for k in MODEL_KEYS}
    doc["simulation"] = {
        "history": list(cfg.history) if cfg.history is not None else None,
        "t_end": cfg.t_end,
        "step": cfg.step,
    }
    doc["scenario"] = {"rules": [
        {"target": r.target.value, "threshold": r.threshold,
         "fraction_removed": r.fraction_removed} for r in cfg.rules]}
    if cfg.grid is not None:
        g = cfg.grid
        doc["grid"] = {k: list(getattr(g, k)) for k in SWEPT}
        doc["grid"].update(
            tau=g.tau, history=list(g.history) if g.history is not None else None,
            t_end=g.t_end, step=g.h, eps_extinct=g.eps_extinct, osc_rel=g.osc_rel,
            workers=g.workers)
    doc["stability"] = {"tau_ref": cfg.tau_ref, "j_max": cfg.j_max}
    doc["output"] = {"dir": cfg.out_dir, "svg": cfg.svg, "log_prey": cfg.log_prey}
    return doc


def serialize_config(cfg: RunConfig) -> str:
    """JSON text that :func:`parse_config` maps back to an equal config."""
    return json.dumps(config_to_dict(cfg), indent=2)
