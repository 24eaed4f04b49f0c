import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from converterless import CostInputs, StackState, cost_comparison, fairness


def stack_with(active, t_on_total):
    n = len(active)
    return StackState(active=np.asarray(active, dtype=bool), v_c=np.zeros(n),
                      t_in_state=np.zeros(n), t_on_total=np.asarray(t_on_total, dtype=float))


def test_all_cells_always_on():
    snap = fairness(stack_with([True] * 4, [50.0] * 4), 50.0)
    np.testing.assert_allclose(snap.sta, 1.0)
    assert snap.max_delta_sta == 0.0


def test_two_of_three_cells():
    snap = fairness(stack_with([True, True, False], [80.0, 80.0, 0.0]), 80.0)
    # ta = (1, 1, 0); share = 2/3; sta = ta * 3/2
    np.testing.assert_allclose(snap.ta, [1.0, 1.0, 0.0])
    np.testing.assert_allclose(snap.sta, [1.5, 1.5, 0.0])
    assert snap.max_delta_sta == pytest.approx(1.5)


def test_time_averaged_divisor():
    # cell 0 on the whole time, cell 1 for half of it; currently only cell 0 on
    snap = fairness(stack_with([True, False], [10.0, 5.0]), 10.0, divisor="time-averaged")
    # mean active count = 1.5 -> share 0.75
    np.testing.assert_allclose(snap.sta, [1 / 0.75, 0.5 / 0.75])
    assert snap.sta.mean() == pytest.approx(1.0)


def test_no_active_cells_gives_zero_sta():
    snap = fairness(stack_with([False, False], [0.0, 0.0]), 1.0)
    assert snap.max_delta_sta == 0.0


def test_elapsed_must_be_positive():
    with pytest.raises(ValueError):
        fairness(StackState.initial(3), 0.0)
    with pytest.raises(ValueError):
        fairness(StackState.initial(3), 1.0, divisor="median")


@settings(max_examples=100, deadline=None)
@given(data=st.data(), n=st.integers(1, 30), elapsed=st.floats(0.1, 1e4))
def test_accounting_identity_and_relabelling(data, n, elapsed):
    t_on = data.draw(st.lists(st.floats(0, elapsed), min_size=n, max_size=n))
    active = data.draw(st.lists(st.booleans(), min_size=n, max_size=n))
    stack = stack_with(active, t_on)
    snap = fairness(stack, elapsed)
    assert (snap.ta * elapsed).sum() == pytest.approx(sum(t_on), rel=1e-12, abs=1e-9)
    assert ((snap.ta >= 0) & (snap.ta <= 1)).all()
    perm = data.draw(st.permutations(range(n)))
    shuffled = stack_with(np.asarray(active)[perm], np.asarray(t_on)[perm])
    assert fairness(shuffled, elapsed).max_delta_sta == pytest.approx(snap.max_delta_sta)


@settings(max_examples=50, deadline=None)
@given(n_total=st.integers(1, 30), data=st.data(), elapsed=st.floats(1, 1e3))
def test_constant_active_count_gives_unit_mean_sta(n_total, data, elapsed):
    # any schedule with a constant active count n: total on-time is n * elapsed
    n_active = data.draw(st.integers(1, n_total))
    weights = np.asarray(data.draw(st.lists(st.floats(0.01, 1), min_size=n_total,
                                            max_size=n_total)))
    t_on = weights / weights.sum() * n_active * elapsed
    if (t_on > elapsed).any():
        return
    active = [True] * n_active + [False] * (n_total - n_active)
    snap = fairness(stack_with(active, t_on), elapsed)
    assert snap.sta.mean() == pytest.approx(1.0, rel=1e-12)


def test_cost_reference_case():
    out = cost_comparison(CostInputs(2000, 10, 10_000, 0.15, 0.14))
    assert (out.cost_with, out.cost_without, out.savings) == (17000.0, 14000.0, 3000.0)
    assert out.pct == pytest.approx(100 * 3000 / 17000, abs=1e-12)


def test_cost_identical_systems():
    out = cost_comparison(CostInputs(0, 5, 1000, 0.2, 0.2))
    assert out.savings == 0 and out.pct == 0


def test_cost_upfront_only_difference():
    out = cost_comparison(CostInputs(1000, 1, 1000, 0.10, 0.10))
    assert out.savings == 1000.0
    assert out.pct == pytest.approx(1000 / 1100 * 100)


def test_cost_zero_division():
    with pytest.raises(ZeroDivisionError):
        cost_comparison(CostInputs(0, 1, 0, 0.1, 0.1))


@pytest.mark.parametrize("bad", [dict(years=0), dict(converter_upfront=-1),
                                 dict(rate_without_converter=-0.1)])
def test_cost_inputs_validated(bad):
    with pytest.raises(ValueError):
        CostInputs(**bad)


@settings(max_examples=100, deadline=None)
@given(upfront=st.floats(0, 1e5), years=st.integers(1, 40), energy=st.floats(1, 1e6),
       r1=st.floats(0.01, 1), r2=st.floats(0, 1), scale=st.floats(1e-3, 1e3))
def test_pct_invariant_under_currency_rescaling(upfront, years, energy, r1, r2, scale):
    a = cost_comparison(CostInputs(upfront, years, energy, r1, r2))
    b = cost_comparison(CostInputs(upfront * scale, years, energy, r1 * scale, r2 * scale))
    assert b.pct == pytest.approx(a.pct, rel=1e-9, abs=1e-9)
