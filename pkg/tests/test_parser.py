import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from timerob.formula import Always, And, Interval, Not, Pred, Predicate, Until
from timerob.oracle import random_formula
from timerob.parser import ParseError, load_formula, parse, to_text


def test_declarations_and_inline_comparisons():
    f = parse("p := 2*x1 - x2 >= 1\nG[0,3] (p & !(x2 <= 0.5))")
    assert isinstance(f, Always) and f.interval == Interval(0, 3)
    p = f.child.args[0].pred
    assert p == Predicate("p", (2.0, -1.0), -1.0)
    inline = f.child.args[1].child.pred
    assert inline.value(np.array([0.0, 0.5])) == pytest.approx(0.0)


def test_named_signals_fix_dimension():
    f = parse("F[0,2] (speed >= 3)", signals=("pos", "speed"))
    (pred,) = [g.pred for g in [f.child]]
    assert pred.coeffs == (0.0, 1.0)
    assert pred.offset == -3.0


def test_unicode_operators():
    assert parse("¬(x1 ≥ 0) ∧ (x1 ≤ 2)", dim=1) == parse("!(x1 >= 0) & (x1 <= 2)", dim=1)


def test_until_binds_looser_than_negation():
    f = parse("!(x1 >= 0) U[1,2] (x1 >= 1)", dim=1)
    assert isinstance(f, Until) and isinstance(f.lhs, Not)


@pytest.mark.parametrize(
    "text, line, col",
    [
        ("G[0,5 (x1 >= 0)", 1, 7),
        ("G[0,5] (x1 >= 0) &", 1, 19),
        ("p := x1 >= 0\nG[2,1] p", 2, 2),
        ("qq", 1, 1),
    ],
)
def test_errors_carry_position(text, line, col):
    with pytest.raises(ParseError) as info:
        parse(text)
    assert (info.value.line, info.value.col) == (line, col)
    assert f"line {line}, column {col}" in str(info.value)


def test_redefinition_rejected():
    with pytest.raises(ParseError):
        parse("p := x1 >= 0\np := x1 >= 1\nG[0,1] p")


def test_load_formula_strips_comments(tmp_path):
    path = tmp_path / "formula.stl"
    path.write_text("# keep x1 high\nhigh := x1 >= 2  # threshold\nG[0,4] high\n", encoding="utf-8")
    f = load_formula(path)
    assert f.child == Pred(Predicate("high", (1.0,), -2.0))


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6))
def test_sign_formula_round_trip(seed):
    f = random_formula(seed, depth=3, n_preds=3)
    preds = {f"p{k}": Predicate(f"p{k}", ()) for k in (1, 2, 3)}
    assert parse(to_text(f), predicates=preds) == f


coef = st.integers(-3, 3).map(float)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(coef, coef, st.integers(-4, 4).map(lambda v: v / 2)), min_size=1, max_size=3),
       st.integers(0, 3), st.integers(0, 3))
def test_coefficient_round_trip(rows, lo, width):
    rows = [r for r in rows if r[0] or r[1]] or [(1.0, 0.0, 0.0)]
    preds = [Pred(Predicate(f"a{k}", (c1, c2), off)) for k, (c1, c2, off) in enumerate(rows)]
    f = Always(And(tuple(preds)) if len(preds) > 1 else preds[0], Interval(lo, lo + width))
    assert parse(to_text(f), dim=2) == f


def test_comments_keep_line_numbers():
    with pytest.raises(ParseError) as info:
        parse("# header\nG[0,5 (x1 >= 0)  # trailing\n")
    assert (info.value.line, info.value.col) == (2, 7)
