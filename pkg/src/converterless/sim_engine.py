"""Fixed-step simulation of the PV array driving the switchable stack.

The bus is treated quasi-statically: the 10 µF smoothing capacitor settles in
microseconds, far below the 70 ms cell time constant and the 1 s controller
period, so the bus voltage is pinned to the stack voltage and the stack current
is the PV current at that voltage, clipped at zero by the blocking diode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

import numpy as np

from converterless._numerics import bisect
from converterless.electrolyser_stack import CellParams, StackState, stack_voltage, step_cells
from converterless.metrics_cost import fairness
from converterless.mppt_controller import ControllerState, mppt_tick
from converterless.pv_model import PvParams, open_circuit_voltage, pv_current

_STEP_RTOL = 1e-9


@dataclass(frozen=True)
class BusModel:
    c_bus: float = 10e-6
    quasi_static: bool = True

    def __post_init__(self):
        if self.c_bus <= 0:
            raise ValueError(f"c_bus must be positive, got {self.c_bus}")
        if not self.quasi_static:
            raise ValueError("only the quasi-static bus is implemented")


@dataclass(frozen=True)
class OperatingPoint:
    v_bus: float
    i: float
    p: float


@dataclass(frozen=True)
class Segment:
    """Constant irradiance ``value`` on ``start..end``, with selectable endpoint closure."""

    start: float
    end: float
    value: float
    include_start: bool = True
    include_end: bool = False

    def contains(self, t: float) -> bool:
        after = t >= self.start if self.include_start else t > self.start
        before = t <= self.end if self.include_end else t < self.end
        return after and before


@dataclass(frozen=True)
class Scenario:
    duration: float
    dt: float = 1e-3
    temperature: float = 25.0
    irradiance: Sequence[Segment] = field(default_factory=lambda: (Segment(0.0, math.inf, 1000.0),))
    controller_period: float = 1.0
    record_interval: float = 0.1

    def __post_init__(self):
        if self.duration < 0:
            raise ValueError(f"duration must be >= 0, got {self.duration}")
        if self.dt <= 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        _steps_per(self.controller_period, self.dt, "controller_period")
        _steps_per(self.record_interval, self.dt, "record_interval")
        _steps_per(self.duration, self.dt, "duration", allow_zero=True)
        segs = list(self.irradiance)
        if not segs or segs[0].start != 0.0 or not segs[0].include_start:
            raise ValueError("irradiance profile must start at t = 0 inclusive")
        for prev, nxt in zip(segs, segs[1:]):
            if prev.end != nxt.start or not (prev.include_end or nxt.include_start):
                raise ValueError(f"irradiance profile has a gap at t = {prev.end}")
        last = segs[-1]
        if last.end < self.duration or (last.end == self.duration and not last.include_end
                                        and self.duration > 0):
            raise ValueError(f"irradiance profile does not cover t = {self.duration}")
        if any(s.value < 0 for s in segs):
            raise ValueError("irradiance must be non-negative")

    def irradiance_at(self, t: float) -> float:
        for seg in self.irradiance:
            if seg.contains(t):
                return seg.value
        raise ValueError(f"no irradiance defined at t = {t}")


def _steps_per(interval: float, dt: float, name: str, allow_zero: bool = False) -> int:
    n = round(interval / dt)
    if (n < 1 and not allow_zero) or abs(n * dt - interval) > _STEP_RTOL * max(interval, dt):
        raise ValueError(f"{name}={interval} s must be a positive integer multiple of dt={dt} s")
    return n


@dataclass(frozen=True)
class SimRecord:
    t: float
    irradiance: float
    v_bus: float
    i: float
    p: float
    n_active: int
    sta: tuple
    max_delta_sta: float


def solve_operating_point(pv: PvParams, stack: StackState, cell_params: CellParams,
                          g: float) -> OperatingPoint:
    if not stack.active.any():
        return OperatingPoint(open_circuit_voltage(pv, g), 0.0, 0.0)
    v_bus = stack_voltage(stack, cell_params)
    i = max(0.0, pv_current(pv, v_bus, g))
    return OperatingPoint(v_bus, i, v_bus * i)


def steady_state_oracle(pv: PvParams, cell_params: CellParams, n: int,
                        g: float) -> OperatingPoint:
    """Settled operating point of a fixed ``n``-cell stack.

    With every capacitor at ``v_c = i * r_e`` the stack is the load line
    ``v = n * (v_e + r_e * i)``; its intersection with the PV curve is found by
    bisection on the current.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")

    def residual(i):
        return pv_current(pv, n * (cell_params.v_e + cell_params.r_e * i), g) - i

    i_max = 1.1 * pv.i_ph_ref * max(g, 0.0) / pv.g_ref
    if residual(0.0) <= 0.0:
        # stack threshold at or above what the array can supply
        return OperatingPoint(n * cell_params.v_e, 0.0, 0.0)
    assert residual(i_max) < 0.0, "oracle bracket has no sign change"
    i = bisect(residual, 0.0, i_max, xtol=1e-9)
    v = n * (cell_params.v_e + cell_params.r_e * i)
    return OperatingPoint(v, i, v * i)


class Simulation:
    """One simulation run.

    Iterate :meth:`records` to advance. ``controller=None`` freezes the stack
    in its initial configuration. Every switch made by the controller is
    appended to ``switch_log`` as ``(t, cell_index, now_active)``.
    """

    def __init__(self, scenario: Scenario, pv: PvParams, cell_params: CellParams,
                 controller: Optional[ControllerState] = None,
                 stack: Optional[StackState] = None, n_total: int = 30,
                 sta_divisor: str = "instantaneous", bus: BusModel = BusModel()):
        self.scenario = scenario
        self.pv = pv
        self.cell_params = cell_params
        self.ctrl = controller
        self.stack = stack if stack is not None else StackState.initial(n_total)
        self.sta_divisor = sta_divisor
        self.bus = bus
        self.switch_log: list[tuple[float, int, bool]] = []
        self.tick_log: list[tuple[float, int]] = []  # (t, n_active after tick)
        self.t = 0.0

    def _record(self, t: float) -> SimRecord:
        g = self.scenario.irradiance_at(t)
        op = solve_operating_point(self.pv, self.stack, self.cell_params, g)
        snap = fairness(self.stack, t, self.sta_divisor)
        return SimRecord(t, g, op.v_bus, op.i, op.p, self.stack.n_active,
                         tuple(snap.sta.tolist()), snap.max_delta_sta)

    def records(self) -> Iterator[SimRecord]:
        sc = self.scenario
        dt = sc.dt
        n_steps = _steps_per(sc.duration, dt, "duration", allow_zero=True)
        ctrl_every = _steps_per(sc.controller_period, dt, "controller_period")
        rec_every = _steps_per(sc.record_interval, dt, "record_interval")

        for k in range(n_steps):
            t = self.t = round(k * dt, 12)
            g = sc.irradiance_at(t)
            op = solve_operating_point(self.pv, self.stack, self.cell_params, g)
            if self.ctrl is not None and k % ctrl_every == 0:
                before = self.stack.active
                self.ctrl, self.stack = mppt_tick(self.ctrl, self.stack, op.p)
                changed = np.flatnonzero(before != self.stack.active)
                for idx in changed:
                    self.switch_log.append((t, int(idx), bool(self.stack.active[idx])))
                self.tick_log.append((t, self.stack.n_active))
                if changed.size:
                    op = solve_operating_point(self.pv, self.stack, self.cell_params, g)
            self.stack = step_cells(self.stack, self.cell_params, op.i, dt)
            if (k + 1) % rec_every == 0:
                yield self._record(round((k + 1) * dt, 12))


def run(scenario: Scenario, pv: PvParams, cell_params: CellParams,
        controller: Optional[ControllerState] = None, **kwargs) -> Iterator[SimRecord]:
    """Stream of records for ``scenario``; see :class:`Simulation` for options."""
    return Simulation(scenario, pv, cell_params, controller, **kwargs).records()
