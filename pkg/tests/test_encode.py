import itertools

import numpy as np
import pytest

from _support import axis_predicates, realized_instance
from timerob import monitor as mon
from timerob.formula import And, F, G, Not, Pred, TrueF
from timerob.milp import (
    EncodingError, MilpModel, Sense, Status, VarKind, encode_boolean, fixed_state,
    linearize_product, milp_async, milp_sync, solve, state_variables,
)
from timerob.signal import ApTrace


@pytest.mark.parametrize("b, x", list(itertools.product((0.0, 1.0), (-3.0, -0.5, 0.0, 2.0, 4.0))))
def test_product_gadget_pins_the_product(b, x):
    m = MilpModel()
    bv = m.add_var("b", VarKind.BINARY, lb=b, ub=b)
    xv = m.add_var("x", lb=x, ub=x)
    y = linearize_product(m, bv, xv, -3.0, 4.0, "y")
    for sense in (Sense.MAX, Sense.MIN):
        m.set_objective(y, sense)
        assert solve(m).objective == pytest.approx(b * x)


def test_product_gadget_needs_finite_bounds():
    m = MilpModel()
    b, x = m.add_var("b", VarKind.BINARY), m.add_var("x")
    with pytest.raises(EncodingError):
        linearize_product(m, b, x, 0.0, float("inf"), "y")


def _solve_fixed(m):
    sol = solve(m)
    assert sol.status is Status.OPTIMAL
    return sol


@pytest.mark.parametrize("seed", range(15))
def test_boolean_encoding_matches_chi(seed):
    f, apt, x = realized_instance([3, seed], 12)
    m = MilpModel()
    enc, z = encode_boolean(m, f, fixed_state(x))
    sol = _solve_fixed(m)
    assert [sol.int_value(v) for v in z] == [(c + 1) // 2 for c in mon.chi_series(f, apt).values.tolist()]


@pytest.mark.parametrize("seed", range(15))
@pytest.mark.parametrize("side", ["plus", "minus"])
def test_sync_encoding_matches_monitor(seed, side):
    f, apt, x = realized_instance([5, seed], 12)
    m = MilpModel()
    idx = milp_sync(m, f, fixed_state(x), side=side)
    sol = _solve_fixed(m)
    assert [sol.int_value(e) for e in idx.eta] == mon.eta_series(f, apt, side).as_ints()


@pytest.mark.parametrize("seed", range(15))
@pytest.mark.parametrize("side", ["plus", "minus"])
def test_async_encoding_matches_monitor(seed, side):
    f, apt, x = realized_instance([7, seed], 10)
    m = MilpModel()
    idx = milp_async(m, f, fixed_state(x), side=side)
    sol = _solve_fixed(m)
    assert [sol.int_value(e) for e in idx.eta] == mon.theta_series(f, apt, side).as_ints()


@pytest.mark.parametrize("seed", range(10))
def test_upper_polarity_gives_the_same_maximum(seed):
    # with free states the exact and one-sided models must agree on max theta(0)
    f, apt, _ = realized_instance([9, seed], 8)
    H = apt.horizon
    L = len(apt.predicates)
    values = []
    for pol in (0, 1):
        m = MilpModel()
        st = state_variables(m, H, [-1.0] * L, [1.0] * L)
        idx = milp_async(m, f, st, polarity=pol)
        m.set_objective(idx.eta[0], Sense.MAX)
        values.append(solve(m).objective)
    assert values[0] == pytest.approx(values[1])


def test_upper_polarity_needs_fewer_binaries():
    p1, p2 = (Pred(p) for p in axis_predicates(2))
    f = G(0, 3, F(0, 2, p1) & p2)
    counts = []
    for pol in (0, 1):
        m = MilpModel()
        milp_async(m, f, state_variables(m, 10, [-1, -1], [1, 1]), polarity=pol)
        counts.append(m.num_binary)
    assert counts[1] < counts[0]


def test_running_example_counters():
    from timerob.casestudies import RUNNING_EXPECTED, _running_counters, running_example

    apt, fs = running_example()
    rows = _running_counters(apt, fs["phi"])
    for key in ("c1", "c0", "c1_hat", "c0_hat"):
        assert rows[key] == RUNNING_EXPECTED[key]
    assert rows["eta_plus_milp"] == RUNNING_EXPECTED["eta_plus"]


def test_sync_binary_count_is_affine_in_h():
    p1, p2 = (Pred(p) for p in axis_predicates(2))
    f = G(0, 2, p1) & F(1, 3, p2)
    counts = {}
    for H in (10, 20, 40):
        m = MilpModel()
        milp_sync(m, f, state_variables(m, H, [-1, -1], [1, 1]))
        counts[H] = m.num_binary
    assert counts[40] - counts[20] == 2 * (counts[20] - counts[10])


def test_infinite_theta_is_rejected():
    m = MilpModel()
    with pytest.raises(EncodingError):
        milp_async(m, G(0, 1, TrueF()), fixed_state(np.zeros((4, 1))))
    with pytest.raises(ValueError):
        milp_async(m, Pred(axis_predicates(1)[0]), fixed_state(np.zeros((4, 1))), polarity=2)


def test_predicate_dimension_mismatch():
    m = MilpModel()
    p = Pred(axis_predicates(2)[0])
    with pytest.raises(EncodingError):
        milp_sync(m, p, fixed_state(np.zeros((3, 1))))
