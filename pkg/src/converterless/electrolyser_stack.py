"""PEM electrolyser cells and the switchable series stack.

Each cell is a reversible-potential diode ``v_e`` in series with a parallel
``r_e``/``c_e`` branch. An active cell carries the stack current; a bypassed
cell is shorted out of the string and its capacitor bleeds through ``r_e``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np


class StepSizeError(ValueError):
    """Integration step too large for the cell RC time constant."""


@dataclass(frozen=True)
class CellParams:
    v_e: float = 1.5
    c_e: float = 0.1
    r_e: float = 0.7

    def __post_init__(self):
        for name in ("v_e", "c_e", "r_e"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")

    @property
    def tau(self) -> float:
        return self.r_e * self.c_e


@dataclass(frozen=True)
class CellState:
    active: bool
    v_c: float
    t_in_state: float
    t_on_total: float


@dataclass(frozen=True, eq=False)
class StackState:
    """All cells of the stack, stored column-wise.

    ``rank`` fixes the tie-break order used when picking a cell to switch:
    lower rank wins. It is the identity unless a seed ordering is supplied.
    """

    active: np.ndarray
    v_c: np.ndarray
    t_in_state: np.ndarray
    t_on_total: np.ndarray
    rank: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.rank is None:
            object.__setattr__(self, "rank", np.arange(len(self.active)))

    @classmethod
    def initial(cls, n_total: int, order=None) -> "StackState":
        """All cells off, discharged, with zeroed counters.

        ``order`` is a permutation of cell indices listing tie-break priority,
        highest first.
        """
        if n_total < 1:
            raise ValueError(f"n_total must be >= 1, got {n_total}")
        rank = np.arange(n_total)
        if order is not None:
            order = np.asarray(order, dtype=int)
            if sorted(order.tolist()) != list(range(n_total)):
                raise ValueError(f"order must be a permutation of 0..{n_total - 1}")
            rank = np.empty(n_total, dtype=int)
            rank[order] = np.arange(n_total)
        return cls(
            active=np.zeros(n_total, dtype=bool),
            v_c=np.zeros(n_total),
            t_in_state=np.zeros(n_total),
            t_on_total=np.zeros(n_total),
            rank=rank,
        )

    @property
    def n_total(self) -> int:
        return len(self.active)

    @property
    def n_active(self) -> int:
        return int(np.count_nonzero(self.active))

    @property
    def cells(self) -> list[CellState]:
        return [
            CellState(bool(a), float(v), float(t), float(on))
            for a, v, t, on in zip(self.active, self.v_c, self.t_in_state, self.t_on_total)
        ]


def stack_voltage(stack: StackState, params: CellParams) -> float:
    """Series voltage of the active cells, ``sum(v_e + v_c)``; 0 when none are active."""
    return float(np.count_nonzero(stack.active) * params.v_e + stack.v_c[stack.active].sum())


def step_cells(stack: StackState, params: CellParams, i_stack: float, dt: float) -> StackState:
    """Advance every cell by one explicit Euler step of length ``dt``.

    Raises StepSizeError when ``dt`` exceeds a tenth of the RC time constant.
    """
    if dt <= 0:
        raise StepSizeError(f"dt must be positive, got {dt}")
    if dt > params.tau / 10:
        raise StepSizeError(f"dt={dt} s exceeds tau/10={params.tau / 10:.6g} s")
    if i_stack < 0:
        raise ValueError(f"stack current must be non-negative, got {i_stack}")
    # bypassed cells see zero current and only self-discharge
    i_cell = np.where(stack.active, i_stack, 0.0)
    v_c = stack.v_c + (dt / params.c_e) * (i_cell - stack.v_c / params.r_e)
    return replace(
        stack,
        v_c=v_c,
        t_in_state=stack.t_in_state + dt,
        t_on_total=stack.t_on_total + np.where(stack.active, dt, 0.0),
    )


def set_cell(stack: StackState, index: int, active: bool) -> StackState:
    """Switch one cell; the capacitor keeps its charge and the state timer resets.

    Requesting the state a cell is already in leaves the stack untouched.
    """
    if not 0 <= index < stack.n_total:
        raise IndexError(f"cell index {index} out of range for {stack.n_total} cells")
    if bool(stack.active[index]) == bool(active):
        return stack
    new_active = stack.active.copy()
    new_active[index] = active
    t_in_state = stack.t_in_state.copy()
    t_in_state[index] = 0.0
    return replace(stack, active=new_active, t_in_state=t_in_state)
