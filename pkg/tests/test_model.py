import math

import numpy as np
import pytest

from timerob.milp import LinExpr, MilpModel, ModelError, Sense, VarKind


def test_expression_arithmetic():
    m = MilpModel()
    x, y = m.add_var("x"), m.add_var("y")
    e = 2 * x - (y - 3) * 0.5 + 1
    assert e.terms == {0: 2.0, 1: -0.5}
    assert e.const == 2.5
    assert e.value([1.0, 2.0]) == pytest.approx(3.5)
    with pytest.raises(TypeError):
        x * y


def test_binary_bounds_are_clamped():
    m = MilpModel()
    b = m.add_var("b", VarKind.BINARY, lb=-4, ub=9)
    assert (b.lb, b.ub) == (0.0, 1.0)
    assert b.is_integral


def test_model_errors():
    m = MilpModel()
    m.add_var("x")
    with pytest.raises(ModelError):
        m.add_var("x")
    with pytest.raises(ModelError):
        m.add_var("bad", lb=2, ub=1)
    with pytest.raises(ModelError):
        m.add_constr(LinExpr(const=1.0), "<=", 0)
    with pytest.raises(ModelError):
        m.add_constr(m.var("x"), "<>", 0)


def test_constant_rows_are_checked_not_stored():
    m = MilpModel()
    assert m.add_constr(LinExpr(const=-1.0), "<=", 0) is None
    assert m.constraints == []


def test_arrays_negate_max_objective():
    m = MilpModel()
    x = m.add_var("x", ub=3)
    y = m.add_var("y", VarKind.INTEGER, lb=-1, ub=1)
    m.add_constr(x + y, ">=", 1)
    m.add_constr(x - y, "==", 0)
    m.set_objective(x + 2 * y, Sense.MAX)
    c, A_ub, b_ub, A_eq, b_eq, lb, ub, integrality = m.arrays()
    assert c.tolist() == [-1.0, -2.0]
    assert A_ub.toarray().tolist() == [[-1.0, -1.0]] and b_ub.tolist() == [-1.0]
    assert A_eq.toarray().tolist() == [[1.0, -1.0]] and b_eq.tolist() == [0.0]
    assert integrality.tolist() == [0, 1]
    assert ub[0] == 3 and lb[1] == -1


def test_violation_measures_rows_bounds_and_integrality():
    m = MilpModel()
    x = m.add_var("x", ub=1)
    b = m.add_var("b", VarKind.BINARY)
    m.add_constr(x + b, "<=", 1)
    assert m.violation(np.array([0.5, 0.0])) == 0.0
    assert m.violation(np.array([1.0, 1.0])) == pytest.approx(1.0)
    assert m.violation(np.array([0.0, 0.5])) == pytest.approx(0.5, abs=1e-5)


def test_stats_and_empty_model():
    m = MilpModel()
    assert m.stats() == {"variables": 0, "binary": 0, "integer": 0, "continuous": 0, "constraints": 0}
    m.add_var("u", lb=-math.inf)
    assert m.stats()["continuous"] == 1
