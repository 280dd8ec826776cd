"""MILP encodings of STL satisfaction and temporal robustness.

Satisfaction uses one binary per (predicate, time) with big-M rows; every
operator variable is continuous in ``[0, 1]`` and pinned to the exact
min/max of its children by the usual conjunction/disjunction rows, so it is
integral whenever the predicate binaries are.

Synchronous robustness follows the backward counter construction: ``c1``
counts how long the formula stays true from ``t`` on, ``c0`` (negatively)
how long it stays false, and the two products with ``z`` are linearized
with the if-then-else product gadget.

Asynchronous robustness reuses the synchronous construction on every
predicate and then combines values bottom-up with big-M min/max blocks,
one selector binary per operand.

Each subformula ``psi`` lives on its own window ``t = 0 .. H - len(psi)``,
matching :mod:`timerob.monitor`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ..formula import (
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
)
from ..monitor import Side
from .model import LinExpr, MilpModel, Var, VarKind

EPS = 1e-6


class EncodingError(ValueError):
    pass


@dataclass
class StateVars:
    """State expressions ``x[t][i]`` with known bounds (needed for big-M)."""

    exprs: list  # (H+1) x n of LinExpr
    lo: np.ndarray
    hi: np.ndarray

    @property
    def horizon(self) -> int:
        return len(self.exprs) - 1

    @property
    def dim(self) -> int:
        return len(self.exprs[0])

    @classmethod
    def fixed(cls, samples) -> "StateVars":
        s = np.atleast_2d(np.asarray(samples, dtype=float))
        exprs = [[LinExpr(const=v) for v in row] for row in s]
        return cls(exprs, s.copy(), s.copy())


def fixed_state(samples) -> StateVars:
    return StateVars.fixed(samples)


def _pred_bounds(p: Predicate, state: StateVars, t: int) -> tuple[float, float]:
    a = np.asarray(p.coeffs)
    lo = a @ np.where(a >= 0, state.lo[t], state.hi[t]) + p.offset
    hi = a @ np.where(a >= 0, state.hi[t], state.lo[t]) + p.offset
    if not (np.isfinite(lo) and np.isfinite(hi)):
        raise EncodingError(f"predicate {p.name!r} needs finite state bounds for big-M")
    return float(lo), float(hi)


def _pred_expr(p: Predicate, state: StateVars, t: int) -> LinExpr:
    if p.dim != state.dim:
        raise EncodingError(f"predicate {p.name!r} has dimension {p.dim}, state has {state.dim}")
    e = LinExpr(const=p.offset)
    for c, x in zip(p.coeffs, state.exprs[t]):
        if c != 0.0:
            e = e + x * c
    return e


@dataclass
class EncodingIndex:
    """Handles to the variables of an encoding, for inspection and readout."""

    H: int
    z: dict = field(default_factory=dict)       # Formula -> list[LinExpr]
    theta: dict = field(default_factory=dict)   # Formula -> list[LinExpr | float]
    c1: list = field(default_factory=list)      # root counters (sync)
    c0: list = field(default_factory=list)
    c1_hat: list = field(default_factory=list)
    c0_hat: list = field(default_factory=list)
    eta: list = field(default_factory=list)
    root: Optional[Formula] = None
    big_m: float = 0.0
    side: Side = Side.PLUS

    def counter_rows(self) -> tuple[list, list]:
        """``c1`` and ``c0`` including the zero boundary entry past the window."""
        zero = LinExpr()
        if self.side is Side.PLUS:
            return self.c1 + [zero], self.c0 + [zero]
        return [zero] + self.c1, [zero] + self.c0


class Encoder:
    """Builds satisfaction/robustness variables for formulas over one state."""

    def __init__(self, model: MilpModel, state: StateVars, H: Optional[int] = None,
                 sat_margin: float = 0.0):
        # sat_margin > 0 also keeps z = 1 away from mu = 0, so that solver
        # round-off cannot put a "true" sample on the wrong side of sign()
        self.sat_margin = float(sat_margin)
        self.m = model
        self.state = state
        self.H = state.horizon if H is None else H
        if self.H > state.horizon:
            raise EncodingError("H exceeds the state horizon")
        self.z: dict[Formula, list] = {}
        self._pred_z: dict[str, list] = {}
        self._sync: dict = {}
        self._uid = 0
        self.big_m_time = 2 * (self.H + 2)

    def _name(self, base: str) -> str:
        self._uid += 1
        return f"{base}#{self._uid}"

    def _window(self, f: Formula) -> int:
        n = self.H - formula_horizon(f) + 1
        if n <= 0:
            raise EncodingError(f"H={self.H} is smaller than the formula horizon {formula_horizon(f)}")
        return n

    # -- boolean layer ------------------------------------------------------

    def _and(self, items: Sequence, tag: str) -> LinExpr:
        items = [LinExpr.of(i) for i in items]
        if len(items) == 1:
            return items[0]
        z = self.m.add_var(self._name(f"and_{tag}"), lb=0.0, ub=1.0)
        for i in items:
            self.m.add_constr(z - i, "<=", 0)
        self.m.add_constr(z - sum(items, LinExpr()), ">=", 1 - len(items))
        return LinExpr.of(z)

    def _or(self, items: Sequence, tag: str) -> LinExpr:
        items = [LinExpr.of(i) for i in items]
        if len(items) == 1:
            return items[0]
        z = self.m.add_var(self._name(f"or_{tag}"), lb=0.0, ub=1.0)
        for i in items:
            self.m.add_constr(z - i, ">=", 0)
        self.m.add_constr(z - sum(items, LinExpr()), "<=", 0)
        return LinExpr.of(z)

    def predicate_z(self, p: Predicate) -> list:
        got = self._pred_z.get(p.name)
        if got is not None:
            return got
        zs = []
        for t in range(self.H + 1):
            mu = _pred_expr(p, self.state, t)
            lo, hi = _pred_bounds(p, self.state, t)
            z = self.m.add_var(f"z[{p.name},{t}]", VarKind.BINARY)
            # z = 1  =>  mu >= margin ;  z = 0  =>  mu <= -eps
            self.m.add_constr(mu - (1 - z) * min(lo, 0.0) - z * self.sat_margin, ">=", 0)
            self.m.add_constr(mu - z * max(hi, 0.0) + (1 - z) * EPS, "<=", 0)
            zs.append(LinExpr.of(z))
        self._pred_z[p.name] = zs
        return zs

    def boolean(self, f: Formula) -> list:
        """z_t for t in the window of ``f``; z = 1 iff chi = +1."""
        got = self.z.get(f)
        if got is not None:
            return got
        n = self._window(f)
        tag = type(f).__name__
        if isinstance(f, TrueF):
            out = [LinExpr(const=1.0)] * n
        elif isinstance(f, Pred):
            out = self.predicate_z(f.pred)[:n]
        elif isinstance(f, Not):
            out = [1 - z for z in self.boolean(f.child)[:n]]
        elif isinstance(f, And):
            kids = [self.boolean(a) for a in f.args]
            out = [self._and([k[t] for k in kids], tag) for t in range(n)]
        elif isinstance(f, Or):
            kids = [self.boolean(a) for a in f.args]
            out = [self._or([k[t] for k in kids], tag) for t in range(n)]
        elif isinstance(f, Implies):
            zl, zr = self.boolean(f.lhs), self.boolean(f.rhs)
            out = [self._or([1 - zl[t], zr[t]], tag) for t in range(n)]
        elif isinstance(f, (Eventually, Always)):
            zc = self.boolean(f.child)
            op = self._or if isinstance(f, Eventually) else self._and
            lo, hi = f.interval
            out = [op([zc[t + k] for k in range(lo, hi + 1)], tag) for t in range(n)]
        elif isinstance(f, Until):
            zl, zr = self.boolean(f.lhs), self.boolean(f.rhs)
            lo, hi = f.interval
            out = []
            for t in range(n):
                prefix = [zl[t + j] for j in range(lo)]
                opts = []
                for k in range(lo, hi + 1):
                    if k > lo:
                        prefix = [self._and([*prefix, zl[t + k - 1]], tag)]
                    opts.append(self._and([zr[t + k], *prefix], tag))
                out.append(self._or(opts, tag))
        else:
            raise TypeError(f"not a formula node: {f!r}")
        self.z[f] = out
        return out

    # -- product gadget -------------------------------------------------------

    def product(self, b, x, xl: float, xu: float, name: str) -> Var:
        return linearize_product(self.m, b, x, xl, xu, name)

    # -- synchronous robustness ---------------------------------------------

    def sync(self, f: Formula, side=Side.PLUS) -> EncodingIndex:
        side = Side.coerce(side)
        key = (f, side)
        if key in self._sync:
            return self._sync[key]
        z = self.boolean(f)
        n = len(z)
        cap = self.H + 1
        order = range(n - 1, -1, -1) if side is Side.PLUS else range(n)
        c1 = [None] * n
        c0 = [None] * n
        nxt1, nxt0 = LinExpr(), LinExpr()  # counters past the window end are 0
        tag = _short(f)
        for t in order:
            y1 = self.product(z[t], nxt1 + 1, 1.0, cap + 1.0, self._name(f"c1[{tag},{t}]"))
            y0 = self.product(1 - z[t], nxt0 - 1, -cap - 1.0, -1.0, self._name(f"c0[{tag},{t}]"))
            c1[t], c0[t] = LinExpr.of(y1), LinExpr.of(y0)
            nxt1, nxt0 = c1[t], c0[t]
        idx = EncodingIndex(self.H, root=f, side=side, big_m=self.big_m_time)
        idx.z[f] = z
        idx.c1, idx.c0 = c1, c0
        idx.c1_hat = [c1[t] - z[t] for t in range(n)]
        idx.c0_hat = [c0[t] + (1 - z[t]) for t in range(n)]
        idx.eta = [idx.c1_hat[t] + idx.c0_hat[t] for t in range(n)]
        self._sync[key] = idx
        return idx

    # -- asynchronous robustness --------------------------------------------

    def _minmax(self, items: list, is_min: bool, tag: str, pol: int = 0):
        # +-inf constants are absorbing/neutral; the rest go through selector
        # rows: r <= r_j (min) and r >= r_j - M(1 - b_j), sum b_j = 1.
        # With pol = +1 only r <= true value is enforced (enough when the
        # value is maximized), with pol = -1 only r >= true value.
        top, bot = (math.inf, -math.inf) if is_min else (-math.inf, math.inf)
        vals = []
        for it in items:
            if isinstance(it, float) and math.isinf(it):
                if it == bot:
                    return bot
                continue
            vals.append(LinExpr.of(it))
        if not vals:
            return top
        if len(vals) == 1:
            return vals[0]
        if all(v.is_constant for v in vals):
            cs = [v.const for v in vals]
            return LinExpr(const=min(cs) if is_min else max(cs))
        M = self.big_m_time
        bound = self.H + 1
        r = self.m.add_var(self._name(f"{'min' if is_min else 'max'}_{tag}"), lb=-bound, ub=bound)
        # sign +1: r below every operand (min) / above every operand (max)
        sign = 1 if is_min else -1
        if pol != -sign:
            for v in vals:
                self.m.add_constr((r - v) * sign, "<=", 0)
        if pol != sign:
            bs = []
            for j, v in enumerate(vals):
                b = self.m.add_var(self._name(f"sel_{tag}_{j}"), VarKind.BINARY)
                bs.append(b)
                self.m.add_constr((r - v) * sign - b * M, ">=", -M)
            self.m.add_constr(sum(bs, LinExpr()), "==", 1)
        return LinExpr.of(r)

    def asynchronous(self, f: Formula, side=Side.PLUS, polarity: int = 0) -> list:
        side = Side.coerce(side)
        memo: dict = {}
        return self._theta(f, side, memo, polarity)

    def _theta(self, f: Formula, side: Side, memo: dict, pol: int = 0) -> list:
        got = memo.get((f, pol))
        if got is not None:
            return got
        n = self._window(f)
        tag = _short(f)
        if isinstance(f, TrueF):
            out = [math.inf] * n
        elif isinstance(f, Pred):
            out = self.sync(f, side).eta[:n]
        elif isinstance(f, Not):
            out = [_neg(v) for v in self._theta(f.child, side, memo, -pol)[:n]]
        elif isinstance(f, (And, Or)):
            kids = [self._theta(a, side, memo, pol) for a in f.args]
            out = [self._minmax([k[t] for k in kids], isinstance(f, And), tag, pol) for t in range(n)]
        elif isinstance(f, Implies):
            tl, tr = self._theta(f.lhs, side, memo, -pol), self._theta(f.rhs, side, memo, pol)
            out = [self._minmax([_neg(tl[t]), tr[t]], False, tag, pol) for t in range(n)]
        elif isinstance(f, (Eventually, Always)):
            tc = self._theta(f.child, side, memo, pol)
            lo, hi = f.interval
            is_min = isinstance(f, Always)
            out = [self._minmax([tc[t + k] for k in range(lo, hi + 1)], is_min, tag, pol)
                   for t in range(n)]
        elif isinstance(f, Until):
            tl, tr = self._theta(f.lhs, side, memo, pol), self._theta(f.rhs, side, memo, pol)
            lo, hi = f.interval
            out = []
            for t in range(n):
                prefix = self._minmax([tl[t + j] for j in range(lo)], True, tag, pol)
                opts = []
                for k in range(lo, hi + 1):
                    if k > lo:
                        prefix = self._minmax([prefix, tl[t + k - 1]], True, tag, pol)
                    opts.append(self._minmax([tr[t + k], prefix], True, tag, pol))
                out.append(self._minmax(opts, False, tag, pol))
        else:
            raise TypeError(f"not a formula node: {f!r}")
        memo[(f, pol)] = out
        return out


def _neg(v):
    return -v if isinstance(v, float) else -LinExpr.of(v)


def _short(f: Formula) -> str:
    return type(f).__name__ if not isinstance(f, Pred) else f.pred.name


def linearize_product(model: MilpModel, b, x, xl: float, xu: float, name: str) -> Var:
    """New variable ``y = b * x`` for binary-valued ``b`` and ``xl <= x <= xu``.

    Four rows: ``xl*b <= y <= xu*b`` and ``x - xu(1-b) <= y <= x - xl(1-b)``.
    """
    if not (np.isfinite(xl) and np.isfinite(xu)):
        raise EncodingError("product gadget needs finite bounds on x")
    if xl > xu:
        raise EncodingError("product gadget bounds are inverted")
    b, x = LinExpr.of(b), LinExpr.of(x)
    y = model.add_var(name, lb=min(xl, 0.0), ub=max(xu, 0.0))
    model.add_constr(y - b * xl, ">=", 0)
    model.add_constr(y - b * xu, "<=", 0)
    model.add_constr(y - x + (1 - b) * xu, ">=", 0)
    model.add_constr(y - x + (1 - b) * xl, "<=", 0)
    return y


def encode_boolean(model: MilpModel, f: Formula, state: StateVars, H: Optional[int] = None):
    """z variables for every subformula; returns ``(Encoder, z_root)``."""
    enc = Encoder(model, state, H)
    return enc, enc.boolean(f)


def milp_sync(model: MilpModel, f: Formula, state: StateVars, H: Optional[int] = None,
              side=Side.PLUS, encoder: Optional[Encoder] = None) -> EncodingIndex:
    """Synchronous robustness variables ``eta_t`` for ``t = 0 .. H - len(f)``."""
    enc = encoder or Encoder(model, state, H)
    idx = enc.sync(f, side)
    idx.z.update(enc.z)
    return idx


def milp_async(model: MilpModel, f: Formula, state: StateVars, H: Optional[int] = None,
               side=Side.PLUS, encoder: Optional[Encoder] = None,
               polarity: int = 0) -> EncodingIndex:
    """Asynchronous robustness expressions ``theta_t`` for the window of ``f``.

    ``polarity=0`` pins every value exactly. ``polarity=+1`` only bounds the
    root from above by its true value, which is exact at the optimum of a
    maximization and needs selector binaries for max-type nodes only.

    Raises :class:`EncodingError` when the value is an infinite constant
    (formulas that reduce to ``true`` or its negation).
    """
    if polarity not in (-1, 0, 1):
        raise ValueError("polarity must be -1, 0 or +1")
    enc = encoder or Encoder(model, state, H)
    side = Side.coerce(side)
    memo: dict = {}
    theta = enc._theta(f, side, memo, polarity)
    if any(isinstance(v, float) for v in theta):
        raise EncodingError("asynchronous robustness is infinite for this formula")
    idx = EncodingIndex(enc.H, root=f, side=side, big_m=enc.big_m_time)
    idx.theta = {g: v for (g, pol), v in memo.items() if pol == polarity}
    idx.eta = theta
    idx.z.update(enc.z)
    return idx


def state_variables(model: MilpModel, H: int, lo: Sequence[float], hi: Sequence[float],
                    prefix: str = "x") -> StateVars:
    """Free continuous state variables inside a box, one per (t, dim)."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    exprs = []
    for t in range(H + 1):
        exprs.append([LinExpr.of(model.add_var(f"{prefix}[{t},{i}]", lb=lo[i], ub=hi[i]))
                      for i in range(len(lo))])
    return StateVars(exprs, np.tile(lo, (H + 1, 1)), np.tile(hi, (H + 1, 1)))
