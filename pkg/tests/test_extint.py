import math

import pytest
from hypothesis import given, strategies as st

from timerob.extint import ExtInt, format_value, join, meet, parse_value

INF, NINF = ExtInt.POS_INF, ExtInt.NEG_INF
ext = st.one_of(st.integers(-1000, 1000).map(ExtInt), st.sampled_from([INF, NINF]))


@given(ext, ext)
def test_meet_join_commute(a, b):
    assert meet([a, b]) == meet([b, a])
    assert join([a, b]) == join([b, a])


@given(ext, ext, ext)
def test_lattice_associative(a, b, c):
    assert meet([meet([a, b]), c]) == meet([a, meet([b, c])])
    assert join([join([a, b]), c]) == join([a, join([b, c])])


@given(ext, ext)
def test_absorption(a, b):
    assert meet([a, join([a, b])]) == a
    assert join([a, meet([a, b])]) == a


@given(ext, ext)
def test_negation_swaps_meet_and_join(a, b):
    assert -meet([a, b]) == join([-a, -b])


def test_empty_meet_and_join():
    assert meet([]) == INF
    assert join([]) == NINF


def test_infinite_sum_undefined():
    with pytest.raises(ArithmeticError):
        INF + NINF
    assert INF + 5 == INF
    assert NINF - 3 == NINF


def test_rejects_fractional():
    with pytest.raises(ValueError):
        ExtInt(1.5)


def test_int_of_infinity_overflows():
    with pytest.raises(OverflowError):
        int(INF)
    assert int(ExtInt(7.0)) == 7


def test_sign_and_zero_product():
    assert ExtInt(0).sign() == 0
    assert NINF.sign() == -1
    assert INF * 0 == ExtInt(0)


@given(ext)
def test_format_parse_round_trip(a):
    assert parse_value(format_value(a)) == a


def test_format_literals():
    assert format_value(math.inf) == "+inf"
    assert format_value(-math.inf) == "-inf"
    assert format_value(-4.0) == "-4"
    assert str(ExtInt(3)) == "3"
