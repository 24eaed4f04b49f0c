"""Converter-less PV to electrolyser-stack simulator.

A PV array feeds a series stack of switchable PEM electrolyser cells through a
blocking diode. Maximum power point tracking is done by switching cells in and
out of the stack, picking cells so that wear is spread evenly.
"""

from converterless.electrolyser_stack import (
    CellParams,
    CellState,
    StackState,
    StepSizeError,
    set_cell,
    stack_voltage,
    step_cells,
)
from converterless.metrics_cost import (
    CostInputs,
    FairnessSnapshot,
    cost_comparison,
    fairness,
)
from converterless.mppt_controller import ControllerState, mppt_tick, select_cell
from converterless.pv_model import (
    CalibrationError,
    PvAnchors,
    PvParams,
    calibrate,
    pv_current,
    pv_mpp,
)
from converterless.sim_engine import (
    BusModel,
    OperatingPoint,
    Scenario,
    Segment,
    SimRecord,
    Simulation,
    run,
    solve_operating_point,
    steady_state_oracle,
)

__all__ = [
    "BusModel",
    "CalibrationError",
    "CellParams",
    "CellState",
    "ControllerState",
    "CostInputs",
    "FairnessSnapshot",
    "OperatingPoint",
    "PvAnchors",
    "PvParams",
    "Scenario",
    "Segment",
    "SimRecord",
    "Simulation",
    "StackState",
    "StepSizeError",
    "calibrate",
    "cost_comparison",
    "fairness",
    "mppt_tick",
    "pv_current",
    "pv_mpp",
    "run",
    "select_cell",
    "set_cell",
    "solve_operating_point",
    "stack_voltage",
    "step_cells",
    "steady_state_oracle",
]
