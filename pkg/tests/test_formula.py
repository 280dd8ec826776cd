import pytest

from timerob.formula import (
    Always, And, Eventually, FormulaError, Fragment, Interval, Not, Or, Pred, Predicate,
    TrueF, Until, F, G, U, canonicalize, formula_horizon, fragments_of, in_fragment,
    operator_count, predicates_of, subformulas, to_nnf, walk,
)
from timerob import oracle
from timerob.oracle import random_apt, random_formula

p = Pred(Predicate("p", (1.0,), 0.0))
q = Pred(Predicate("q", (0.0,), 1.0))


def test_interval_validation():
    with pytest.raises(FormulaError):
        Interval(3, 2)
    with pytest.raises(FormulaError):
        Interval(-1, 2)
    assert tuple(Interval(1, 4)) == (1, 4)


def test_horizon_and_operator_count():
    f = G(0, 5, p & F(2, 3, q))
    assert formula_horizon(f) == 8
    assert operator_count(f) == 3
    assert formula_horizon(U(1, 4, p, G(0, 2, q))) == 6


def test_predicate_value_and_support():
    r = Predicate("r", (2.0, 0.0, -1.0), 0.5)
    assert r.value([1.0, 9.0, 2.0]) == pytest.approx(0.5)
    assert r.support() == (0, 2)
    with pytest.raises(FormulaError):
        r.value([1.0, 2.0])


def test_predicates_of_rejects_conflicts():
    clash = Pred(Predicate("p", (2.0,), 0.0))
    with pytest.raises(FormulaError):
        predicates_of(p & clash)
    assert [x.name for x in predicates_of(p | (q & p))] == ["p", "q"]


def test_subformulas_postorder():
    f = G(0, 1, p & q)
    subs = subformulas(f)
    assert subs[-1] == f
    assert subs.index(p) < subs.index(And((p, q)))


def test_canonical_grammar():
    f = Or((G(0, 2, p), F(1, 3, Not(q))))
    allowed = (TrueF, Pred, Not, And, Until)
    assert all(isinstance(g, allowed) for g in walk(canonicalize(f)))


def test_nnf_fragments():
    f = Not(F(0, 3, Not(p) | q))
    g = to_nnf(f)
    assert g == G(0, 3, And((p, Not(q))))
    assert fragments_of(g) == {Fragment.AND_ALWAYS}
    assert fragments_of(p) == {Fragment.AND_ALWAYS, Fragment.OR_EVENTUALLY}
    assert not in_fragment(Not(G(0, 1, p)), Fragment.AND_ALWAYS)


@pytest.mark.parametrize("seed", range(40))
def test_nnf_preserves_semantics(seed):
    f = random_formula(seed, depth=3)
    apt = random_apt(2, formula_horizon(f) + 4, seed)
    g = to_nnf(f)
    assert not any(isinstance(n, Not) and not isinstance(n.child, (TrueF, Pred)) for n in walk(g))
    for t in range(apt.horizon - formula_horizon(f) + 1):
        assert oracle.brute_chi(f, apt, t) == oracle.brute_chi(g, apt, t)
        assert oracle.brute_theta(f, apt, t) == oracle.brute_theta(g, apt, t)


def test_operator_sugar():
    assert (p & q) == And((p, q))
    assert (p | q) == Or((p, q))
    assert ~p == Not(p)
    assert Eventually(p, Interval(0, 1)) == F(0, 1, p)
    assert Always(p, Interval(0, 1)) == G(0, 1, p)
    assert Until(p, q, Interval(0, 1)) == U(0, 1, p, q)
