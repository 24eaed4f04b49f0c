"""Run configuration: TOML loading, validation, and the built-in scenarios.

Example file::

    [scenario]
    name = "irradiance-step"      # or give duration/irradiance inline
    duration = 300.0

    [pv]
    voc = 129.0

    [stack]
    n_total = 30

Unknown tables or keys are rejected.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from converterless.electrolyser_stack import CellParams
from converterless.metrics_cost import STA_DIVISORS, CostInputs
from converterless.pv_model import PvAnchors
from converterless.sim_engine import Scenario, Segment


class ConfigError(ValueError):
    """Bad configuration; ``key`` names the offending entry."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


def startup_scenario(duration: float = 200.0) -> Scenario:
    return Scenario(duration=duration, irradiance=(Segment(0.0, math.inf, 1000.0),))


def irradiance_step_scenario(duration: float = 300.0) -> Scenario:
    # 600 on [0, 100), 1000 on [100, 200], 600 on (200, 300]
    return Scenario(duration=duration, irradiance=(
        Segment(0.0, 100.0, 600.0),
        Segment(100.0, 200.0, 1000.0, include_end=True),
        Segment(200.0, max(300.0, duration), 600.0, include_start=False, include_end=True),
    ))


BUILTIN_SCENARIOS = {
    "startup": startup_scenario,
    "irradiance-step": irradiance_step_scenario,
}


@dataclass
class RunConfig:
    scenario: Scenario = field(default_factory=startup_scenario)
    scenario_name: str = "startup"
    anchors: PvAnchors = field(default_factory=PvAnchors)
    cell: CellParams = field(default_factory=CellParams)
    n_total: int = 30
    sta_divisor: str = "instantaneous"
    cost: CostInputs = field(default_factory=CostInputs)
    out_dir: Path = Path("out")
    seed_order: Optional[list[int]] = None


_SCENARIO_KEYS = {"name", "duration", "dt", "temperature", "controller_period",
                  "record_interval", "irradiance"}
_SEGMENT_KEYS = {f.name for f in fields(Segment)}
_TABLES = {
    "scenario": _SCENARIO_KEYS,
    "pv": {f.name for f in fields(PvAnchors)},
    "cell": {f.name for f in fields(CellParams)},
    "stack": {"n_total"},
    "metrics": {"sta_divisor"},
    "cost": {f.name for f in fields(CostInputs)},
    "output": {"dir"},
}


def _check_keys(table: dict, allowed: set, prefix: str):
    for key in table:
        if key not in allowed:
            raise ConfigError(f"{prefix}{key}", "unknown key")


def _build(cls, table: dict, prefix: str):
    try:
        return cls(**table)
    except (TypeError, ValueError) as exc:
        raise ConfigError(prefix.rstrip("."), str(exc)) from None


def _scenario(table: dict, duration: Optional[float], dt: Optional[float]) -> tuple[str, Scenario]:
    name = table.get("name")
    if name is not None and name not in BUILTIN_SCENARIOS:
        raise ConfigError("scenario.name",
                          f"unknown scenario {name!r}; built-ins: {sorted(BUILTIN_SCENARIOS)}")
    if name is None and "irradiance" not in table:
        name = "startup"
    opts = {k: v for k, v in table.items() if k not in ("name", "irradiance")}
    if duration is not None:
        opts["duration"] = duration
    if dt is not None:
        opts["dt"] = dt
    try:
        if name is not None:
            if "irradiance" in table:
                raise ConfigError("scenario.irradiance", "cannot be combined with scenario.name")
            base = BUILTIN_SCENARIOS[name](opts.pop("duration")) if "duration" in opts \
                else BUILTIN_SCENARIOS[name]()
            opts = {**{f.name: getattr(base, f.name) for f in fields(Scenario)}, **opts}
            return name, Scenario(**opts)
        segs = []
        for i, seg in enumerate(table["irradiance"]):
            _check_keys(seg, _SEGMENT_KEYS, f"scenario.irradiance[{i}].")
            segs.append(_build(Segment, seg, f"scenario.irradiance[{i}]."))
        if "duration" not in opts:
            raise ConfigError("scenario.duration", "required for an inline scenario")
        return "custom", Scenario(irradiance=tuple(segs), **opts)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError("scenario", str(exc)) from None


def parse_config(data: dict, *, duration: Optional[float] = None,
                 dt: Optional[float] = None) -> RunConfig:
    """Build a :class:`RunConfig` from a parsed TOML document, applying CLI overrides."""
    _check_keys(data, set(_TABLES), "")
    for name, allowed in _TABLES.items():
        if not isinstance(data.get(name, {}), dict):
            raise ConfigError(name, "must be a table")
        _check_keys(data.get(name, {}), allowed, f"{name}.")

    cfg = RunConfig()
    cfg.scenario_name, cfg.scenario = _scenario(data.get("scenario", {}), duration, dt)
    cfg.anchors = _build(PvAnchors, data.get("pv", {}), "pv.")
    cfg.cell = _build(CellParams, data.get("cell", {}), "cell.")
    cfg.cost = _build(CostInputs, data.get("cost", {}), "cost.")

    n_total = data.get("stack", {}).get("n_total", 30)
    if not isinstance(n_total, int) or n_total < 1:
        raise ConfigError("stack.n_total", f"must be a positive integer, got {n_total!r}")
    cfg.n_total = n_total

    divisor = data.get("metrics", {}).get("sta_divisor", "instantaneous")
    if divisor not in STA_DIVISORS:
        raise ConfigError("metrics.sta_divisor", f"must be one of {STA_DIVISORS}")
    cfg.sta_divisor = divisor

    if cfg.scenario.temperature != cfg.anchors.t_ref:
        raise ConfigError("scenario.temperature",
                          f"only the reference temperature {cfg.anchors.t_ref} °C is modelled")
    if "dir" in data.get("output", {}):
        cfg.out_dir = Path(data["output"]["dir"])
    return cfg


def load_config(path, **overrides) -> RunConfig:
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(str(path), f"invalid TOML ({exc})") from None
    return parse_config(data, **overrides)


def read_seed_order(path) -> list[int]:
    """Cell indices, highest tie-break priority first, separated by commas or whitespace."""
    text = Path(path).read_text()
    try:
        return [int(tok) for tok in text.replace(",", " ").split()]
    except ValueError as exc:
        raise ConfigError("seed-order", str(exc)) from None
