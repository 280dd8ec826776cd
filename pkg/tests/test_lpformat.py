import pytest
from hypothesis import given, settings, strategies as st

from timerob.milp import MilpModel, ModelError, Sense, VarKind, lp_text, read_lp, solve, write_lp
from timerob.milp.lpformat import lp_names


def _small():
    m = MilpModel("demo")
    x = m.add_var("x", ub=4)
    y = m.add_var("y[1,2]", VarKind.BINARY)
    z = m.add_var("z", VarKind.INTEGER, lb=-3, ub=3)
    m.add_constr(x + y, "<=", 1)
    m.add_constr(x - 2 * z, "==", 0.5)
    m.set_objective(x + y + z)
    return m


def test_empty_model_has_all_sections():
    text = lp_text(MilpModel())
    for head in ("Maximize", "Subject To", "Bounds", "End"):
        assert head in text


def test_single_row():
    m = MilpModel()
    x, y = m.add_var("x"), m.add_var("y")
    m.add_constr(x + y, "<=", 1)
    text = lp_text(m)
    assert " r0: + 1 x + 1 y <= 1" in text


def test_names_are_sanitized_and_unique():
    m = _small()
    names = lp_names(m)
    assert len(set(names)) == len(names)
    assert all("[" not in n and "," not in n for n in names)


def test_round_trip_preserves_structure(tmp_path):
    m = _small()
    write_lp(m, tmp_path / "m.lp")
    back = read_lp(tmp_path / "m.lp")
    assert back.stats() == m.stats()
    assert [v.kind for v in back.vars] == [v.kind for v in m.vars]
    assert [(v.lb, v.ub) for v in back.vars] == [(v.lb, v.ub) for v in m.vars]
    assert [(c.terms, c.sense, c.rhs) for c in back.constraints] == \
        [(c.terms, c.sense, c.rhs) for c in m.constraints]
    assert back.sense is Sense.MAX
    assert solve(back).objective == pytest.approx(solve(m).objective)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.integers(-5, 5), st.integers(-5, 5), st.integers(0, 10)), min_size=1, max_size=4),
       st.booleans())
def test_random_models_round_trip(rows, minimize):
    m = MilpModel()
    x = m.add_var("x", lb=-5, ub=5)
    y = m.add_var("y", VarKind.INTEGER, lb=-5, ub=5)
    for a, b, c in rows:
        if a or b:
            m.add_constr(a * x + b * y, "<=", c)
    m.set_objective(x - y, Sense.MIN if minimize else Sense.MAX)
    back = read_lp(lp_text(m))
    assert lp_text(back).splitlines()[1:] == lp_text(m).splitlines()[1:]


def test_reader_rejects_garbage():
    with pytest.raises((ModelError, ValueError)):
        read_lp("Maximize\n obj: x\nSubject To\n r0: x <=\nEnd\n")
