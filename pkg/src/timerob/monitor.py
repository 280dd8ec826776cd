"""Satisfaction and temporal robustness series over finite traces.

Every subformula ``psi`` is evaluated on its own window ``[0, H - len(psi)]``
of the trace, where ``len`` is :func:`formula_horizon`. Inside that window
all indices an operator reads exist, so no clipping is needed.

Synchronous robustness is the signed length of the run of constant
satisfaction starting at ``t`` (plus side) or ending at ``t`` (minus side),
capped at the window. Asynchronous robustness starts from the same quantity
on each predicate (capped at the full trace) and is combined bottom-up with
min/max, which is why it is computed per operator rather than from the
root's satisfaction.

Series are float arrays so that +-inf are representable; finite entries are
always integral.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .extint import ExtInt, format_value
from .formula import (
    Always,
    And,
    Eventually,
    Formula,
    Implies,
    Not,
    Or,
    Pred,
    Predicate,
    TrueF,
    Until,
    formula_horizon,
    predicates_of,
)
from .signal import ApTrace, Trace, evaluate_predicates


class EvaluationError(ValueError):
    pass


class Side(enum.Enum):
    PLUS = "plus"
    MINUS = "minus"

    @classmethod
    def coerce(cls, s) -> "Side":
        if isinstance(s, cls):
            return s
        return {"+": cls.PLUS, "-": cls.MINUS}.get(s) or cls(str(s).lower())


class Kind(enum.Enum):
    ETA_PLUS = "eta_plus"
    ETA_MINUS = "eta_minus"
    THETA_PLUS = "theta_plus"
    THETA_MINUS = "theta_minus"


@dataclass(frozen=True, eq=False)
class SatSeries:
    values: np.ndarray  # int8, +1 / -1
    start: int = 0

    def at(self, t: int) -> int:
        return int(self.values[t - self.start])

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True, eq=False)
class RobustnessSeries:
    kind: Kind
    values: np.ndarray  # float; integral or +-inf
    start: int = 0

    def at(self, t: int) -> ExtInt:
        return ExtInt(float(self.values[t - self.start]))

    def to_list(self) -> list:
        return [ExtInt(float(v)) for v in self.values]

    def as_ints(self) -> list[int]:
        """Values as ints; raises if any entry is infinite."""
        if not np.all(np.isfinite(self.values)):
            raise OverflowError("series has infinite entries")
        return [int(v) for v in self.values]

    def __len__(self):
        return len(self.values)


def _window(f: Formula, apt: ApTrace) -> int:
    n = apt.horizon - formula_horizon(f) + 1
    if n <= 0:
        raise EvaluationError(
            f"trace horizon {apt.horizon} is shorter than the formula horizon {formula_horizon(f)}"
        )
    return n


def _temporal(vals: np.ndarray, lo: int, hi: int, n: int, reduce) -> np.ndarray:
    # reduce over vals[t+lo .. t+hi] for t in [0, n)
    out = vals[lo : lo + n].copy()
    for k in range(lo + 1, hi + 1):
        out = reduce(out, vals[k : k + n])
    return out


def _until(v1: np.ndarray, v2: np.ndarray, lo: int, hi: int, n: int, top) -> np.ndarray:
    # sup_{k in [lo,hi]} min(v2[t+k], inf_{j<k} v1[t+j]); empty inf is top
    prefix = np.full(n, top, dtype=v1.dtype)
    for k in range(lo):
        prefix = np.minimum(prefix, v1[k : k + n])
    out = np.minimum(v2[lo : lo + n], prefix)
    for k in range(lo + 1, hi + 1):
        prefix = np.minimum(prefix, v1[k - 1 : k - 1 + n])
        out = np.maximum(out, np.minimum(v2[k : k + n], prefix))
    return out


def _chi(f: Formula, apt: ApTrace, memo: dict) -> np.ndarray:
    got = memo.get(f)
    if got is not None:
        return got
    n = _window(f, apt)
    if isinstance(f, TrueF):
        out = np.ones(n, dtype=np.int8)
    elif isinstance(f, Pred):
        out = apt.row(f.pred.name)
    elif isinstance(f, Not):
        out = -_chi(f.child, apt, memo)
    elif isinstance(f, (And, Or)):
        red = np.minimum if isinstance(f, And) else np.maximum
        out = _chi(f.args[0], apt, memo)[:n]
        for a in f.args[1:]:
            out = red(out, _chi(a, apt, memo)[:n])
    elif isinstance(f, Implies):
        out = np.maximum(-_chi(f.lhs, apt, memo)[:n], _chi(f.rhs, apt, memo)[:n])
    elif isinstance(f, Eventually):
        out = _temporal(_chi(f.child, apt, memo), *f.interval, n, np.maximum)
    elif isinstance(f, Always):
        out = _temporal(_chi(f.child, apt, memo), *f.interval, n, np.minimum)
    elif isinstance(f, Until):
        out = _until(_chi(f.lhs, apt, memo), _chi(f.rhs, apt, memo), *f.interval, n, np.int8(1))
    else:
        raise TypeError(f"not a formula node: {f!r}")
    out = np.asarray(out, dtype=np.int8)
    memo[f] = out
    return out


def chi_series(f: Formula, apt: ApTrace) -> SatSeries:
    """chi_f(t) for every t in ``[0, H - len(f)]``."""
    return SatSeries(_chi(f, apt, {}).copy(), apt.start)


def chi(f: Formula, apt: ApTrace, t: int) -> int:
    n = _window(f, apt)
    if not 0 <= t < n:
        raise EvaluationError(f"t={t} outside the evaluable range [0, {n - 1}]")
    return int(_chi(f, apt, {})[t])


def run_lengths(signs: np.ndarray, side) -> np.ndarray:
    """Signed run length of constant sign from each index to the window end.

    Plus: steps until the last index of the run that contains ``t``.
    Minus: steps back to its first index.
    """
    side = Side.coerce(side)
    s = np.asarray(signs)
    n = len(s)
    if n == 0:
        return np.zeros(0)
    if side is Side.MINUS:
        return run_lengths(s[::-1], Side.PLUS)[::-1]
    idx = np.arange(n)
    is_end = np.ones(n, dtype=bool)
    is_end[:-1] = s[:-1] != s[1:]
    ends = np.where(is_end, idx, n)
    next_end = np.minimum.accumulate(ends[::-1])[::-1]
    return (s * (next_end - idx)).astype(float)


def eta_series(f: Formula, apt: ApTrace, side=Side.PLUS) -> RobustnessSeries:
    side = Side.coerce(side)
    kind = Kind.ETA_PLUS if side is Side.PLUS else Kind.ETA_MINUS
    return RobustnessSeries(kind, run_lengths(_chi(f, apt, {}), side), apt.start)


def _theta(f: Formula, apt: ApTrace, side: Side, memo: dict) -> np.ndarray:
    got = memo.get(f)
    if got is not None:
        return got
    n = _window(f, apt)
    if isinstance(f, TrueF):
        # true holds at every time, so any shift keeps it
        out = np.full(n, math.inf)
    elif isinstance(f, Pred):
        out = run_lengths(apt.row(f.pred.name), side)
    elif isinstance(f, Not):
        out = -_theta(f.child, apt, side, memo)
    elif isinstance(f, (And, Or)):
        red = np.minimum if isinstance(f, And) else np.maximum
        out = _theta(f.args[0], apt, side, memo)[:n]
        for a in f.args[1:]:
            out = red(out, _theta(a, apt, side, memo)[:n])
    elif isinstance(f, Implies):
        out = np.maximum(-_theta(f.lhs, apt, side, memo)[:n], _theta(f.rhs, apt, side, memo)[:n])
    elif isinstance(f, Eventually):
        out = _temporal(_theta(f.child, apt, side, memo), *f.interval, n, np.maximum)
    elif isinstance(f, Always):
        out = _temporal(_theta(f.child, apt, side, memo), *f.interval, n, np.minimum)
    elif isinstance(f, Until):
        out = _until(_theta(f.lhs, apt, side, memo), _theta(f.rhs, apt, side, memo),
                     *f.interval, n, math.inf)
    else:
        raise TypeError(f"not a formula node: {f!r}")
    out = np.asarray(out, dtype=float)
    memo[f] = out
    return out


def theta_series(f: Formula, apt: ApTrace, side=Side.PLUS) -> RobustnessSeries:
    side = Side.coerce(side)
    kind = Kind.THETA_PLUS if side is Side.PLUS else Kind.THETA_MINUS
    return RobustnessSeries(kind, _theta(f, apt, side, {}).copy(), apt.start)


@dataclass(frozen=True, eq=False)
class MonitorResult:
    chi: SatSeries
    eta_plus: RobustnessSeries
    eta_minus: RobustnessSeries
    theta_plus: RobustnessSeries
    theta_minus: RobustnessSeries

    def rows(self):
        for i, c in enumerate(self.chi.values):
            yield (self.chi.start + i, int(c), *(format_value(s.values[i]) for s in self._series()))

    def _series(self):
        return (self.eta_plus, self.eta_minus, self.theta_plus, self.theta_minus)

    def to_csv(self) -> str:
        lines = ["t,chi,eta_plus,eta_minus,theta_plus,theta_minus"]
        lines += [",".join(str(v) for v in r) for r in self.rows()]
        return "\n".join(lines) + "\n"

    def summary(self) -> dict:
        out = {"chi": self.chi.at(self.chi.start)}
        for s in self._series():
            out[s.kind.value] = format_value(s.values[0])
        return out


def monitor(f: Formula, apt: ApTrace) -> MonitorResult:
    return MonitorResult(
        chi_series(f, apt),
        eta_series(f, apt, Side.PLUS),
        eta_series(f, apt, Side.MINUS),
        theta_series(f, apt, Side.PLUS),
        theta_series(f, apt, Side.MINUS),
    )


def monitor_signal(f: Formula, trace: Union[Trace, ApTrace]) -> MonitorResult:
    """All five series for ``f`` over a real-valued trace (or a ready ApTrace)."""
    if isinstance(trace, ApTrace):
        return monitor(f, trace)
    preds = predicates_of(f)
    if not preds:
        # formulas built only from ``true`` still need a time axis
        preds = [Predicate("__time__", (0.0,) * trace.dim, 0.0)]
    return monitor(f, evaluate_predicates(trace, preds))
