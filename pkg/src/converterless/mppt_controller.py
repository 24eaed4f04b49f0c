"""Hill-climbing MPPT over the number of active cells, with wear levelling.

Every tick the controller compares the sampled power with the previous sample,
reverses direction on a strict drop, and then switches one cell: the cell that
has been off the longest is switched in, or the cell that has been on the
longest is switched out. That selection rule turns the stack into a FIFO, so
cells are used in rotation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from converterless.electrolyser_stack import StackState, set_cell


@dataclass(frozen=True)
class ControllerState:
    dn: int = 1  # +1 add a cell, -1 remove one
    p_prev: float = 0.0
    tick_count: int = 0

    def __post_init__(self):
        if self.dn not in (-1, 1):
            raise ValueError(f"dn must be -1 or +1, got {self.dn}")
        if self.p_prev < 0:
            raise ValueError(f"p_prev must be non-negative, got {self.p_prev}")


def select_cell(stack: StackState, want_active: bool) -> int:
    """Index of the cell to switch into state ``want_active``.

    Among cells currently in the opposite state, the one with the largest
    ``t_in_state`` wins; ties go to the lowest tie-break rank (the lowest index
    by default).
    """
    candidates = np.flatnonzero(stack.active != want_active)
    if candidates.size == 0:
        state = "inactive" if want_active else "active"
        raise ValueError(f"no {state} cell to switch")
    t = stack.t_in_state[candidates]
    best = candidates[t == t.max()]
    return int(best[np.argmin(stack.rank[best])])


def mppt_tick(ctrl: ControllerState, stack: StackState,
              p_curr: float) -> tuple[ControllerState, StackState]:
    """One controller update.

    State timers are advanced continuously by the integrator, so there is no
    per-tick increment here. At the limits (one cell left while removing, all
    cells on while adding) no cell is switched and the direction reverses.
    """
    if p_curr < 0:
        raise ValueError(f"sampled power must be non-negative, got {p_curr}")
    dn = ctrl.dn
    if p_curr < ctrl.p_prev:
        dn = -dn

    n_active = stack.n_active
    if dn > 0:
        if n_active == stack.n_total:
            dn = -dn
        else:
            stack = set_cell(stack, select_cell(stack, True), True)
    else:
        if n_active <= 1:
            dn = -dn
        else:
            stack = set_cell(stack, select_cell(stack, False), False)

    return ControllerState(dn=dn, p_prev=p_curr, tick_count=ctrl.tick_count + 1), stack
