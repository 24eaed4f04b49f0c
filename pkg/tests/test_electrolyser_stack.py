import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from converterless import CellParams, StackState, StepSizeError, set_cell, stack_voltage, step_cells


def make_stack(active, v_c, t_in_state=None, t_on_total=None):
    n = len(active)
    return StackState(
        active=np.asarray(active, dtype=bool),
        v_c=np.asarray(v_c, dtype=float),
        t_in_state=np.zeros(n) if t_in_state is None else np.asarray(t_in_state, dtype=float),
        t_on_total=np.zeros(n) if t_on_total is None else np.asarray(t_on_total, dtype=float),
    )


def exact_v_c(v0, i, t, cell):
    """Closed form of c dv/dt = i - v/r."""
    return i * cell.r_e + (v0 - i * cell.r_e) * math.exp(-t / cell.tau)


def integrate(stack, cell, i, t_end, dt=1e-3):
    for _ in range(round(t_end / dt)):
        stack = step_cells(stack, cell, i, dt)
    return stack


def test_defaults():
    cell = CellParams()
    assert (cell.v_e, cell.c_e, cell.r_e) == (1.5, 0.1, 0.7)
    assert cell.tau == pytest.approx(0.07)


@pytest.mark.parametrize("bad", [dict(v_e=0), dict(c_e=-1), dict(r_e=0)])
def test_cell_params_positive(bad):
    with pytest.raises(ValueError):
        CellParams(**bad)


def test_stack_voltage_uncharged(cell):
    stack = make_stack([True] * 20 + [False] * 10, [0.0] * 30)
    assert stack_voltage(stack, cell) == pytest.approx(30.0)


def test_stack_voltage_charged(cell):
    stack = make_stack([True] * 20 + [False] * 10, [3.81] * 20 + [2.0] * 10)
    assert stack_voltage(stack, cell) == pytest.approx(106.2)


def test_stack_voltage_empty(cell):
    assert stack_voltage(StackState.initial(30), cell) == 0.0


def test_active_cell_charges_to_ir(cell):
    stack = integrate(make_stack([True], [0.0]), cell, 5.0, 20 * cell.tau)
    assert stack.v_c[0] == pytest.approx(3.5, rel=1e-6)


def test_bypassed_cell_decays_one_time_constant(cell):
    stack = integrate(make_stack([False], [3.5]), cell, 5.0, 0.07)
    assert stack.v_c[0] == pytest.approx(3.5 / math.e, rel=0.01)


def test_single_euler_step(cell):
    stack = step_cells(make_stack([True], [1.0]), cell, 5.0, 1e-3)
    assert stack.v_c[0] == pytest.approx(1.0 + 0.001 * (5 - 1.0 / 0.7) / 0.1, rel=1e-12)
    assert stack.v_c[0] == pytest.approx(exact_v_c(1.0, 5.0, 1e-3, cell), rel=1e-3)


def test_counters_advance(cell):
    stack = make_stack([True, False], [0.0, 0.0], [2.0, 3.0], [1.0, 0.0])
    stack = step_cells(stack, cell, 1.0, 1e-3)
    np.testing.assert_allclose(stack.t_in_state, [2.001, 3.001])
    np.testing.assert_allclose(stack.t_on_total, [1.001, 0.0])


def test_step_does_not_mutate_input(cell):
    stack = make_stack([True], [0.0])
    step_cells(stack, cell, 5.0, 1e-3)
    assert stack.v_c[0] == 0.0


@pytest.mark.parametrize("dt", [0.0071, 0.01, 0.0, -1e-3])
def test_step_size_guard(cell, dt):
    with pytest.raises(StepSizeError):
        step_cells(make_stack([True], [0.0]), cell, 1.0, dt)


def test_negative_current_rejected(cell):
    with pytest.raises(ValueError):
        step_cells(make_stack([True], [0.0]), cell, -0.1, 1e-3)


def test_set_cell_activate_resets_timer():
    stack = make_stack([False, False], [0.4, 0.0], [12.0, 3.0])
    new = set_cell(stack, 0, True)
    assert new.active[0] and new.t_in_state[0] == 0.0 and new.v_c[0] == 0.4
    assert new.t_in_state[1] == 3.0
    assert not stack.active[0]


def test_set_cell_deactivate():
    stack = make_stack([True], [2.0], [7.0])
    new = set_cell(stack, 0, False)
    assert not new.active[0] and new.t_in_state[0] == 0.0 and new.v_c[0] == 2.0


def test_set_cell_same_state_is_noop():
    stack = make_stack([True], [2.0], [7.0])
    assert set_cell(stack, 0, True) is stack


def test_set_cell_index_range():
    with pytest.raises(IndexError):
        set_cell(StackState.initial(3), 3, True)


def test_initial_order_ranks():
    stack = StackState.initial(4, order=[2, 0, 3, 1])
    assert stack.rank.tolist() == [1, 3, 0, 2]
    with pytest.raises(ValueError):
        StackState.initial(3, order=[0, 0, 1])


def test_cells_view():
    cells = make_stack([True, False], [1.0, 0.5], [2.0, 3.0], [4.0, 0.0]).cells
    assert cells[0].active and not cells[1].active
    assert cells[1].v_c == 0.5 and cells[0].t_on_total == 4.0


def test_euler_matches_closed_form_over_ten_tau(cell):
    dt, i = 1e-3, 5.0
    stack = make_stack([True], [0.0])
    euler, exact = [], []
    for k in range(1, round(10 * cell.tau / dt) + 1):
        stack = step_cells(stack, cell, i, dt)
        euler.append(stack.v_c[0])
        exact.append(exact_v_c(0.0, i, k * dt, cell))
    euler, exact = np.array(euler), np.array(exact)
    assert np.max(np.abs(euler - exact)) / np.max(np.abs(exact)) <= 0.005


@settings(max_examples=50, deadline=None)
@given(v0=st.floats(0, 10), i=st.floats(0, 6))
def test_active_cell_converges_monotonically(cell, v0, i):
    stack = make_stack([True], [v0])
    gaps = []
    for _ in range(300):
        stack = step_cells(stack, cell, i, 1e-3)
        gaps.append(abs(stack.v_c[0] - i * cell.r_e))
    assert all(b <= a + 1e-15 for a, b in zip(gaps, gaps[1:]))


@settings(max_examples=50, deadline=None)
@given(ops=st.lists(st.tuples(st.integers(0, 4), st.booleans(), st.floats(0, 6)),
                    max_size=60),
       v0=st.lists(st.floats(0, 5), min_size=5, max_size=5))
def test_capacitor_voltage_never_negative(cell, ops, v0):
    stack = make_stack([False] * 5, v0)
    for idx, on, i in ops:
        stack = set_cell(stack, idx, on)
        for _ in range(5):
            stack = step_cells(stack, cell, i, 1e-3)
        assert (stack.v_c >= 0).all()


@settings(max_examples=50, deadline=None)
@given(v_off=st.lists(st.floats(0, 100), min_size=3, max_size=3))
def test_bypassed_cells_do_not_affect_voltage(cell, v_off):
    base = make_stack([True, True, False, False, False], [1.0, 2.0, 0.0, 0.0, 0.0])
    other = make_stack([True, True, False, False, False], [1.0, 2.0, *v_off])
    assert stack_voltage(base, cell) == stack_voltage(other, cell)
