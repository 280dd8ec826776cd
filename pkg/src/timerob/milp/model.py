"""Solver-agnostic mixed-integer linear model.

Variables are referenced by :class:`Var` handles. Linear expressions are
:class:`LinExpr` objects built with ordinary arithmetic, e.g.::

    m = MilpModel()
    x = m.add_var("x", lb=0, ub=3)
    b = m.add_var("b", VarKind.BINARY)
    m.add_constr(x - 3 * b, "<=", 0)
    m.set_objective(x, Sense.MAX)
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Union

import numpy as np
from scipy import sparse


class ModelError(ValueError):
    pass


class VarKind(enum.Enum):
    CONTINUOUS = "continuous"
    INTEGER = "integer"
    BINARY = "binary"


class Sense(enum.Enum):
    MAX = "max"
    MIN = "min"


_SENSES = {"<=": "<=", "=<": "<=", ">=": ">=", "=>": ">=", "==": "==", "=": "=="}


@dataclass(frozen=True)
class Var:
    index: int
    name: str
    kind: VarKind
    lb: float
    ub: float

    def _expr(self) -> "LinExpr":
        return LinExpr({self.index: 1.0})

    # arithmetic delegates to LinExpr
    def __add__(self, o):
        return self._expr() + o

    __radd__ = __add__

    def __sub__(self, o):
        return self._expr() - o

    def __rsub__(self, o):
        return o - self._expr()

    def __mul__(self, k):
        return self._expr() * k

    __rmul__ = __mul__

    def __neg__(self):
        return -self._expr()

    @property
    def is_integral(self) -> bool:
        return self.kind is not VarKind.CONTINUOUS


Number = Union[int, float]


class LinExpr:
    """Sparse affine expression ``sum coef_i * v_i + const``."""

    __slots__ = ("terms", "const")

    def __init__(self, terms: Optional[dict] = None, const: float = 0.0):
        self.terms: dict[int, float] = dict(terms or {})
        self.const = float(const)

    @staticmethod
    def of(x) -> "LinExpr":
        if isinstance(x, LinExpr):
            return x
        if isinstance(x, Var):
            return x._expr()
        if isinstance(x, (int, float, np.integer, np.floating)):
            return LinExpr(const=float(x))
        raise TypeError(f"cannot build a linear expression from {type(x).__name__}")

    def copy(self) -> "LinExpr":
        return LinExpr(self.terms, self.const)

    def __add__(self, o):
        o = LinExpr.of(o)
        out = self.copy()
        for k, v in o.terms.items():
            out.terms[k] = out.terms.get(k, 0.0) + v
        out.const += o.const
        return out

    __radd__ = __add__

    def __neg__(self):
        return LinExpr({k: -v for k, v in self.terms.items()}, -self.const)

    def __sub__(self, o):
        return self + (-LinExpr.of(o))

    def __rsub__(self, o):
        return LinExpr.of(o) - self

    def __mul__(self, k):
        if not isinstance(k, (int, float, np.integer, np.floating)):
            raise TypeError("only scalar multiplication keeps an expression linear")
        k = float(k)
        return LinExpr({i: v * k for i, v in self.terms.items()}, self.const * k)

    __rmul__ = __mul__

    @property
    def is_constant(self) -> bool:
        return all(v == 0 for v in self.terms.values())

    def value(self, x) -> float:
        return self.const + sum(v * float(x[i]) for i, v in self.terms.items())

    def __repr__(self) -> str:
        parts = [f"{v:+g}*v{k}" for k, v in sorted(self.terms.items())]
        return f"LinExpr({' '.join(parts)} {self.const:+g})"


@dataclass
class Constraint:
    terms: dict
    sense: str  # "<=", ">=", "=="
    rhs: float
    name: str


class MilpModel:
    def __init__(self, name: str = "model"):
        self.name = name
        self.vars: list[Var] = []
        self.constraints: list[Constraint] = []
        self._names: dict[str, int] = {}
        self.objective = LinExpr()
        self.sense = Sense.MAX
        # lets the solver prune with ceil/floor when the optimum is integral
        self.integral_objective = False

    # -- building
    def add_var(self, name: str, kind: VarKind = VarKind.CONTINUOUS,
                lb: float = 0.0, ub: float = math.inf) -> Var:
        if name in self._names:
            raise ModelError(f"duplicate variable name {name!r}")
        if kind is VarKind.BINARY:
            lb, ub = max(0.0, float(lb)), min(1.0, float(ub))
        lb, ub = float(lb), float(ub)
        if lb > ub:
            raise ModelError(f"variable {name!r} has lb {lb} > ub {ub}")
        v = Var(len(self.vars), name, kind, lb, ub)
        self.vars.append(v)
        self._names[name] = v.index
        return v

    def var(self, name: str) -> Var:
        return self.vars[self._names[name]]

    def add_constr(self, lhs, sense: str, rhs=0.0, name: Optional[str] = None) -> Optional[Constraint]:
        """Add ``lhs sense rhs``. Variable-free rows are checked, not stored."""
        try:
            sense = _SENSES[sense]
        except KeyError:
            raise ModelError(f"unknown constraint sense {sense!r}") from None
        e = LinExpr.of(lhs) - LinExpr.of(rhs)
        terms = {k: v for k, v in e.terms.items() if v != 0.0}
        for k in terms:
            if not 0 <= k < len(self.vars):
                raise ModelError(f"constraint references undeclared variable {k}")
        b = -e.const
        if not terms:
            ok = {"<=": 0.0 <= b + 1e-9, ">=": 0.0 >= b - 1e-9, "==": abs(b) <= 1e-9}[sense]
            if not ok:
                raise ModelError(f"constant constraint 0 {sense} {b} is infeasible")
            return None
        c = Constraint(terms, sense, b, name or f"c{len(self.constraints)}")
        self.constraints.append(c)
        return c

    def set_objective(self, expr, sense: Sense = Sense.MAX, integral: bool = False):
        self.objective = LinExpr.of(expr)
        self.sense = sense
        self.integral_objective = integral

    # -- queries
    @property
    def num_vars(self) -> int:
        return len(self.vars)

    def count(self, kind: VarKind) -> int:
        return sum(1 for v in self.vars if v.kind is kind)

    @property
    def num_binary(self) -> int:
        return self.count(VarKind.BINARY)

    def stats(self) -> dict:
        return {
            "variables": self.num_vars,
            "binary": self.num_binary,
            "integer": self.count(VarKind.INTEGER),
            "continuous": self.count(VarKind.CONTINUOUS),
            "constraints": len(self.constraints),
        }

    def arrays(self):
        """Dense-objective, sparse-constraint arrays in ``<=`` / ``==`` form.

        Returns ``c, A_ub, b_ub, A_eq, b_eq, lb, ub, integrality`` for a
        *minimization* (the objective is negated for MAX models).
        """
        n = self.num_vars
        c = np.zeros(n)
        for k, v in self.objective.terms.items():
            c[k] = v
        if self.sense is Sense.MAX:
            c = -c
        rows_ub, rows_eq = ([], [], []), ([], [], [])
        b_ub, b_eq = [], []
        for con in self.constraints:
            if con.sense == "==":
                tgt, rhs, sign = rows_eq, b_eq, 1.0
            else:
                tgt, rhs, sign = rows_ub, b_ub, (1.0 if con.sense == "<=" else -1.0)
            r = len(rhs)
            for k, v in con.terms.items():
                tgt[0].append(r)
                tgt[1].append(k)
                tgt[2].append(sign * v)
            rhs.append(sign * con.rhs)
        A_ub = sparse.csr_matrix((rows_ub[2], (rows_ub[0], rows_ub[1])), shape=(len(b_ub), n))
        A_eq = sparse.csr_matrix((rows_eq[2], (rows_eq[0], rows_eq[1])), shape=(len(b_eq), n))
        lb = np.array([v.lb for v in self.vars])
        ub = np.array([v.ub for v in self.vars])
        integ = np.array([v.is_integral for v in self.vars], dtype=bool)
        return c, A_ub, np.array(b_ub), A_eq, np.array(b_eq), lb, ub, integ

    def violation(self, x, int_tol: float = 1e-6) -> float:
        """Largest constraint, bound or integrality violation of assignment ``x``."""
        x = np.asarray(x, dtype=float)
        worst = 0.0
        for v in self.vars:
            worst = max(worst, v.lb - x[v.index], x[v.index] - v.ub)
            if v.is_integral:
                worst = max(worst, abs(x[v.index] - round(x[v.index])) - int_tol)
        for con in self.constraints:
            lhs = sum(c * x[k] for k, c in con.terms.items())
            d = lhs - con.rhs
            worst = max(worst, {"<=": d, ">=": -d, "==": abs(d)}[con.sense])
        return max(worst, 0.0)

    def objective_value(self, x) -> float:
        return self.objective.value(x)


def fix_vars(model: MilpModel, assignments: Iterable[tuple[Var, float]]) -> None:
    for v, val in assignments:
        model.add_constr(v, "==", val, name=f"fix_{v.name}")
