"""Extended integers: the integers together with -inf and +inf.

Temporal robustness values live here. Finite values are plain ints so that
ordinary arithmetic and comparison work; the two infinities are singletons.
"""
from __future__ import annotations

import math
from functools import total_ordering
from typing import Iterable, Union


@total_ordering
class ExtInt:
    """An element of Z u {-inf, +inf}.

    ``ExtInt(3)``, ``ExtInt.POS_INF`` and ``ExtInt.NEG_INF`` cover the three
    cases. Instances compare against each other and against plain numbers.
    """

    __slots__ = ("_v",)

    POS_INF: "ExtInt"
    NEG_INF: "ExtInt"

    def __init__(self, value: Union[int, float, "ExtInt"]):
        if isinstance(value, ExtInt):
            value = value._v
        if isinstance(value, float):
            if math.isinf(value):
                self._v = value
                return
            if not value.is_integer():
                raise ValueError(f"ExtInt needs an integral value, got {value!r}")
            value = int(value)
        self._v = int(value)

    @property
    def is_finite(self) -> bool:
        return not isinstance(self._v, float)

    def __int__(self) -> int:
        if not self.is_finite:
            raise OverflowError("cannot convert infinite ExtInt to int")
        return self._v

    def __float__(self) -> float:
        return float(self._v)

    def __neg__(self) -> "ExtInt":
        return ExtInt(-self._v)

    def __abs__(self) -> "ExtInt":
        return ExtInt(abs(self._v))

    def __add__(self, other) -> "ExtInt":
        o = _raw(other)
        s = self._v + o
        if isinstance(s, float) and math.isnan(s):
            raise ArithmeticError("+inf + -inf is undefined")
        return ExtInt(s)

    __radd__ = __add__

    def __sub__(self, other) -> "ExtInt":
        return self + (-ExtInt(other))

    def __rsub__(self, other) -> "ExtInt":
        return ExtInt(other) - self

    def __mul__(self, other) -> "ExtInt":
        o = _raw(other)
        if o == 0 or self._v == 0:
            return ExtInt(0)
        return ExtInt(self._v * o)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        try:
            return self._v == _raw(other)
        except TypeError:
            return NotImplemented

    def __lt__(self, other) -> bool:
        return self._v < _raw(other)

    def __hash__(self) -> int:
        return hash(self._v)

    def sign(self) -> int:
        return (self._v > 0) - (self._v < 0)

    def __repr__(self) -> str:
        if self._v == math.inf:
            return "ExtInt.POS_INF"
        if self._v == -math.inf:
            return "ExtInt.NEG_INF"
        return f"ExtInt({self._v})"

    def __str__(self) -> str:
        return format_value(self._v)


def _raw(x):
    if isinstance(x, ExtInt):
        return x._v
    if isinstance(x, (int, float)):
        return x
    raise TypeError(f"cannot combine ExtInt with {type(x).__name__}")


ExtInt.POS_INF = ExtInt(math.inf)
ExtInt.NEG_INF = ExtInt(-math.inf)


def meet(values: Iterable) -> ExtInt:
    """Infimum; the empty infimum is +inf."""
    out = ExtInt.POS_INF
    for v in values:
        v = ExtInt(v)
        if v < out:
            out = v
    return out


def join(values: Iterable) -> ExtInt:
    """Supremum; the empty supremum is -inf."""
    out = ExtInt.NEG_INF
    for v in values:
        v = ExtInt(v)
        if v > out:
            out = v
    return out


def format_value(v) -> str:
    """Render a robustness value for CSV output (``+inf`` / ``-inf`` literals)."""
    v = float(v)
    if v == math.inf:
        return "+inf"
    if v == -math.inf:
        return "-inf"
    return str(int(v))


def parse_value(text: str) -> ExtInt:
    text = text.strip()
    if text in ("+inf", "inf"):
        return ExtInt.POS_INF
    if text == "-inf":
        return ExtInt.NEG_INF
    return ExtInt(int(text))
