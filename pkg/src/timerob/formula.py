"""STL abstract syntax: linear predicates, integer intervals, formula nodes.

All nodes are frozen dataclasses, so formulas hash, compare structurally and
can be shared freely. ``Or``, ``Implies``, ``Eventually`` and ``Always`` are
derived forms; :func:`canonicalize` rewrites them into the base grammar
``True | Pred | Not | And | Until``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np


class FormulaError(ValueError):
    """Raised for structurally invalid formulas or predicate sets."""


@dataclass(frozen=True)
class Predicate:
    """Linear predicate ``coeffs . x + offset >= 0``."""

    name: str
    coeffs: tuple[float, ...]
    offset: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        object.__setattr__(self, "offset", float(self.offset))
        if not self.name:
            raise FormulaError("predicate needs a name")

    @property
    def dim(self) -> int:
        return len(self.coeffs)

    def value(self, x) -> np.ndarray:
        """mu(x) for one state (shape ``(n,)``) or a batch (shape ``(T, n)``)."""
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dim:
            raise FormulaError(
                f"predicate {self.name!r} expects dimension {self.dim}, got {x.shape[-1]}"
            )
        return x @ np.asarray(self.coeffs) + self.offset

    def support(self) -> tuple[int, ...]:
        """Indices of the state dimensions the predicate depends on."""
        return tuple(i for i, c in enumerate(self.coeffs) if c != 0.0)


@dataclass(frozen=True)
class Interval:
    """Closed integer interval ``[lo, hi]`` in sample counts."""

    lo: int
    hi: int

    def __post_init__(self):
        if int(self.lo) != self.lo or int(self.hi) != self.hi:
            raise FormulaError(f"interval bounds must be integers: [{self.lo},{self.hi}]")
        if self.lo < 0:
            raise FormulaError(f"negative interval bound: [{self.lo},{self.hi}]")
        if self.lo > self.hi:
            raise FormulaError(f"malformed interval, lo > hi: [{self.lo},{self.hi}]")

    def __iter__(self):
        return iter((self.lo, self.hi))

    def __str__(self) -> str:
        return f"[{self.lo},{self.hi}]"


class Formula:
    """Base class of all formula nodes."""

    __slots__ = ()

    def children(self) -> tuple["Formula", ...]:
        return ()

    def __str__(self) -> str:
        from .parser import format_formula

        return format_formula(self)

    # operator sugar, handy in tests and notebooks
    def __and__(self, other: "Formula") -> "Formula":
        return And((self, other))

    def __or__(self, other: "Formula") -> "Formula":
        return Or((self, other))

    def __invert__(self) -> "Formula":
        return Not(self)


@dataclass(frozen=True, repr=False)
class TrueF(Formula):
    def __repr__(self) -> str:
        return "TrueF()"


@dataclass(frozen=True, repr=False)
class Pred(Formula):
    pred: Predicate

    def __repr__(self) -> str:
        return f"Pred({self.pred.name!r})"


@dataclass(frozen=True)
class Not(Formula):
    child: Formula

    def children(self):
        return (self.child,)


def _as_tuple(items) -> tuple:
    items = tuple(items)
    if len(items) < 2:
        raise FormulaError("n-ary boolean operators need at least two operands")
    return items


@dataclass(frozen=True)
class And(Formula):
    args: tuple[Formula, ...]

    def __post_init__(self):
        object.__setattr__(self, "args", _as_tuple(self.args))

    def children(self):
        return self.args


@dataclass(frozen=True)
class Or(Formula):
    args: tuple[Formula, ...]

    def __post_init__(self):
        object.__setattr__(self, "args", _as_tuple(self.args))

    def children(self):
        return self.args


@dataclass(frozen=True)
class Implies(Formula):
    lhs: Formula
    rhs: Formula

    def children(self):
        return (self.lhs, self.rhs)


@dataclass(frozen=True)
class Until(Formula):
    lhs: Formula
    rhs: Formula
    interval: Interval

    def children(self):
        return (self.lhs, self.rhs)


@dataclass(frozen=True)
class Eventually(Formula):
    child: Formula
    interval: Interval

    def children(self):
        return (self.child,)


@dataclass(frozen=True)
class Always(Formula):
    child: Formula
    interval: Interval

    def children(self):
        return (self.child,)


# -- constructors ----------------------------------------------------------

def interval(lo: int, hi: int) -> Interval:
    return Interval(int(lo), int(hi))


def F(lo: int, hi: int, child: Formula) -> Eventually:
    return Eventually(child, interval(lo, hi))


def G(lo: int, hi: int, child: Formula) -> Always:
    return Always(child, interval(lo, hi))


def U(lo: int, hi: int, lhs: Formula, rhs: Formula) -> Until:
    return Until(lhs, rhs, interval(lo, hi))


# -- structural queries ----------------------------------------------------

def walk(f: Formula) -> Iterator[Formula]:
    """Pre-order traversal."""
    yield f
    for c in f.children():
        yield from walk(c)


def subformulas(f: Formula) -> list[Formula]:
    """Distinct subformulas in post-order (children before parents)."""
    seen: dict[Formula, None] = {}

    def visit(g):
        for c in g.children():
            visit(c)
        if g not in seen:
            seen[g] = None

    visit(f)
    return list(seen)


def operator_count(f: Formula) -> int:
    """|phi|: the number of operator (non-leaf) nodes."""
    return sum(1 for g in walk(f) if g.children())


def formula_horizon(f: Formula) -> int:
    """len(phi): samples past ``t`` that ``chi_phi(x, t)`` may read."""
    if isinstance(f, (TrueF, Pred)):
        return 0
    if isinstance(f, Not):
        return formula_horizon(f.child)
    if isinstance(f, (And, Or)):
        return max(formula_horizon(a) for a in f.args)
    if isinstance(f, Implies):
        return max(formula_horizon(f.lhs), formula_horizon(f.rhs))
    if isinstance(f, (Eventually, Always)):
        return f.interval.hi + formula_horizon(f.child)
    if isinstance(f, Until):
        return f.interval.hi + max(formula_horizon(f.lhs), formula_horizon(f.rhs))
    raise TypeError(f"not a formula node: {f!r}")


def predicates_of(f: Formula) -> list[Predicate]:
    """Predicates in first-occurrence order, deduplicated by name."""
    found: dict[str, Predicate] = {}
    for g in walk(f):
        if isinstance(g, Pred):
            p = g.pred
            old = found.get(p.name)
            if old is None:
                found[p.name] = p
            elif old != p:
                raise FormulaError(f"predicate {p.name!r} declared with differing coefficients")
    return list(found.values())


# -- rewriting -------------------------------------------------------------

def canonicalize(f: Formula) -> Formula:
    """Rewrite into ``True | Pred | Not | And | Until``."""
    if isinstance(f, (TrueF, Pred)):
        return f
    if isinstance(f, Not):
        return Not(canonicalize(f.child))
    if isinstance(f, And):
        return And(tuple(canonicalize(a) for a in f.args))
    if isinstance(f, Or):
        return Not(And(tuple(Not(canonicalize(a)) for a in f.args)))
    if isinstance(f, Implies):
        return Not(And((canonicalize(f.lhs), Not(canonicalize(f.rhs)))))
    if isinstance(f, Until):
        return Until(canonicalize(f.lhs), canonicalize(f.rhs), f.interval)
    if isinstance(f, Eventually):
        return Until(TrueF(), canonicalize(f.child), f.interval)
    if isinstance(f, Always):
        return Not(Until(TrueF(), Not(canonicalize(f.child)), f.interval))
    raise TypeError(f"not a formula node: {f!r}")


def _at(k: int, g: Formula, positive: bool) -> Formula:
    # exact one-step offsets; F[k,k] and G[k,k] coincide
    if k == 0:
        return g
    return Eventually(g, Interval(k, k)) if positive else Always(g, Interval(k, k))


def to_nnf(f: Formula) -> Formula:
    """Push negations down to the leaves.

    A negated until has no dual in the grammar, so it is unrolled over its
    (finite, integer) interval into conjunctions/disjunctions of exactly
    offset operands. The unrolling preserves chi and theta pointwise.
    """
    return _nnf(f, False)


def _nnf(f: Formula, neg: bool) -> Formula:
    if isinstance(f, (TrueF, Pred)):
        return Not(f) if neg else f
    if isinstance(f, Not):
        return _nnf(f.child, not neg)
    if isinstance(f, And):
        args = tuple(_nnf(a, neg) for a in f.args)
        return Or(args) if neg else And(args)
    if isinstance(f, Or):
        args = tuple(_nnf(a, neg) for a in f.args)
        return And(args) if neg else Or(args)
    if isinstance(f, Implies):
        if neg:
            return And((_nnf(f.lhs, False), _nnf(f.rhs, True)))
        return Or((_nnf(f.lhs, True), _nnf(f.rhs, False)))
    if isinstance(f, Eventually):
        c = _nnf(f.child, neg)
        return Always(c, f.interval) if neg else Eventually(c, f.interval)
    if isinstance(f, Always):
        c = _nnf(f.child, neg)
        return Eventually(c, f.interval) if neg else Always(c, f.interval)
    if isinstance(f, Until):
        if not neg:
            return Until(_nnf(f.lhs, False), _nnf(f.rhs, False), f.interval)
        return _negated_until(f)
    raise TypeError(f"not a formula node: {f!r}")


def _negated_until(f: Until) -> Formula:
    # not (l U[a,b] r) == AND_{k=a..b} ( not r@k  OR  OR_{j<k} not l@j )
    nl = _nnf(f.lhs, True)
    nr = _nnf(f.rhs, True)
    conj = []
    for k in range(f.interval.lo, f.interval.hi + 1):
        disj = [_at(k, nr, True)] + [_at(j, nl, True) for j in range(k)]
        conj.append(disj[0] if len(disj) == 1 else Or(tuple(disj)))
    return conj[0] if len(conj) == 1 else And(tuple(conj))


class Fragment(enum.Enum):
    AND_ALWAYS = "STL(and,always)"
    OR_EVENTUALLY = "STL(or,eventually)"


def _is_literal(g: Formula) -> bool:
    return isinstance(g, (TrueF, Pred)) or (
        isinstance(g, Not) and isinstance(g.child, (TrueF, Pred))
    )


def in_fragment(f: Formula, fragment: Fragment) -> bool:
    ok = (And, Always) if fragment is Fragment.AND_ALWAYS else (Or, Eventually)
    for g in walk(f):
        # a Not that is not part of a literal fails the isinstance check too
        if not _is_literal(g) and not isinstance(g, ok):
            return False
    return True


def fragments_of(f: Formula) -> set[Fragment]:
    """Negation-normal-form fragments the formula belongs to (possibly both)."""
    return {fr for fr in Fragment if in_fragment(f, fr)}


def conjunction(items: Sequence[Formula]) -> Formula:
    items = tuple(items)
    return items[0] if len(items) == 1 else And(items)


def disjunction(items: Sequence[Formula]) -> Formula:
    items = tuple(items)
    return items[0] if len(items) == 1 else Or(items)
