"""Text syntax for STL formulas.

Surface grammar, loosest binding first::

    formula   := implies
    implies   := or ( '->' implies )?
    or        := and ( '|' and )*
    and       := until ( '&' until )*
    until     := unary ( 'U' '[' int ',' int ']' unary )?
    unary     := '!' unary | ('F'|'G') '[' int ',' int ']' unary | atom
    atom      := 'true' | name | comparison | '(' formula ')'
    comparison:= linexpr ('>=' | '<=') linexpr

A formula file holds zero or more declarations ``name := comparison``, one
per line, followed by the formula. ``#`` starts a comment. Signal dimensions
are referenced as ``x1 .. xn`` (1-based) unless explicit signal names are
given.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Optional, Sequence

from .formula import (
    Always,
    And,
    Eventually,
    Formula,
    FormulaError,
    Implies,
    Interval,
    Not,
    Or,
    Pred,
    Predicate,
    TrueF,
    Until,
    predicates_of,
)


class ParseError(ValueError):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"line {line}, column {col}: {msg}")
        self.line = line
        self.col = col


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<num>\d+\.\d*(?:[eE][-+]?\d+)?|\.\d+(?:[eE][-+]?\d+)?|\d+(?:[eE][-+]?\d+)?)
  | (?P<op>:=|>=|<=|->|=>|[!&|()\[\],+\-*]|¬|∧|∨|→|⇒|≥|≤)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
    """,
    re.VERBOSE,
)

_UNICODE_OPS = {"¬": "!", "∧": "&", "∨": "|", "→": "->", "⇒": "->", "=>": "->", "≥": ">=", "≤": "<="}
_KEYWORDS = {"true", "F", "G", "U"}
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z_0-9]*\Z")


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str, line: int = 1) -> list[_Tok]:
    toks = []
    pos = 0
    col0 = 0
    while pos < len(text):
        if text[pos] == "\n":
            line += 1
            pos += 1
            col0 = pos
            continue
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - col0 + 1)
        kind = m.lastgroup
        if kind != "ws":
            tok = m.group()
            toks.append(_Tok(kind, _UNICODE_OPS.get(tok, tok), line, pos - col0 + 1))
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - col0 + 1))
    return toks


def _num(v: float) -> str:
    v = float(v)
    if v == 0:
        return "0"
    return str(int(v)) if v.is_integer() else repr(v)


def comparison_text(coeffs: Sequence[float], offset: float, signals: Optional[Sequence[str]] = None) -> str:
    """Canonical ``a.x >= c`` rendering used as the name of inline predicates."""
    names = list(signals) if signals else [f"x{i + 1}" for i in range(len(coeffs))]
    parts = []
    for c, nm in zip(coeffs, names):
        if c == 0:
            continue
        mag = abs(c)
        body = nm if mag == 1 else f"{_num(mag)}*{nm}"
        if not parts:
            parts.append(body if c > 0 else f"-{body}")
        else:
            parts.append(f"+ {body}" if c > 0 else f"- {body}")
    lhs = " ".join(parts) if parts else "0"
    return f"{lhs} >= {_num(-offset)}"


class _Parser:
    def __init__(self, toks, predicates, signals, dim):
        self.toks = toks
        self.i = 0
        self.preds: dict[str, Predicate] = dict(predicates or {})
        self.signals = list(signals) if signals else None
        self.dim = dim

    # -- token helpers
    @property
    def cur(self) -> _Tok:
        return self.toks[self.i]

    def peek(self, k=1) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def err(self, msg, tok=None):
        tok = tok or self.cur
        return ParseError(msg, tok.line, tok.col)

    def accept(self, text) -> bool:
        if self.cur.kind in ("op", "ident") and self.cur.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text):
        if not self.accept(text):
            got = self.cur.text or "end of input"
            raise self.err(f"expected {text!r}, got {got!r}")

    # -- grammar
    def formula(self) -> Formula:
        lhs = self.disj()
        if self.accept("->"):
            return Implies(lhs, self.formula())
        return lhs

    def disj(self) -> Formula:
        args = [self.conj()]
        while self.accept("|"):
            args.append(self.conj())
        return args[0] if len(args) == 1 else Or(tuple(args))

    def conj(self) -> Formula:
        args = [self.until()]
        while self.accept("&"):
            args.append(self.until())
        return args[0] if len(args) == 1 else And(tuple(args))

    def until(self) -> Formula:
        lhs = self.unary()
        if self.cur.kind == "ident" and self.cur.text == "U" and self.peek().text == "[":
            self.i += 1
            iv = self.interval()
            return Until(lhs, self.unary(), iv)
        return lhs

    def unary(self) -> Formula:
        if self.accept("!"):
            return Not(self.unary())
        t = self.cur
        if t.kind == "ident" and t.text in ("F", "G") and self.peek().text == "[":
            self.i += 1
            iv = self.interval()
            child = self.unary()
            return Eventually(child, iv) if t.text == "F" else Always(child, iv)
        return self.atom()

    def interval(self) -> Interval:
        start = self.cur
        self.expect("[")
        lo = self.integer()
        self.expect(",")
        hi = self.integer()
        self.expect("]")
        try:
            return Interval(lo, hi)
        except FormulaError as e:
            raise self.err(str(e), start) from None

    def integer(self) -> int:
        neg = self.accept("-")
        t = self.cur
        if t.kind != "num":
            raise self.err(f"expected an integer, got {t.text or 'end of input'!r}")
        v = float(t.text)
        if not v.is_integer():
            raise self.err("interval bounds must be integers")
        self.i += 1
        return -int(v) if neg else int(v)

    def atom(self) -> Formula:
        t = self.cur
        if t.kind == "ident" and t.text == "true":
            self.i += 1
            return TrueF()
        if self.accept("("):
            f = self.formula()
            self.expect(")")
            return f
        if t.kind == "ident" and self.peek().text not in (">=", "<=", "+", "-", "*"):
            if t.text in _KEYWORDS:
                raise self.err(f"unexpected keyword {t.text!r}")
            self.i += 1
            p = self.preds.get(t.text)
            if p is None:
                raise self.err(f"unknown predicate {t.text!r}", t)
            return Pred(p)
        if t.kind in ("num", "ident") or t.text in ("-", "+"):
            coeffs, offset = self.comparison()
            name = comparison_text(coeffs, offset, self.signals)
            return Pred(self._register(Predicate(name, coeffs, offset), t))
        raise self.err(f"unexpected {t.text or 'end of input'!r}")

    def _register(self, p: Predicate, tok) -> Predicate:
        old = self.preds.get(p.name)
        if old is not None and old != p:
            raise self.err(f"predicate {p.name!r} redefined with different coefficients", tok)
        self.preds[p.name] = p
        return p

    def comparison(self):
        lhs = self.linexpr()
        t = self.cur
        if self.accept(">="):
            rhs = self.linexpr()
            diff = _sub(lhs, rhs)
        elif self.accept("<="):
            rhs = self.linexpr()
            diff = _sub(rhs, lhs)
        else:
            raise self.err("expected '>=' or '<=' in comparison")
        coeffs = [0.0] * self.dim
        for k, c in diff[0].items():
            coeffs[k] += c
        return tuple(coeffs), diff[1]

    def linexpr(self):
        terms: dict[int, float] = {}
        const = 0.0
        sign = 1.0
        if self.accept("-"):
            sign = -1.0
        else:
            self.accept("+")
        while True:
            idx, c = self.term()
            if idx is None:
                const += sign * c
            else:
                terms[idx] = terms.get(idx, 0.0) + sign * c
            if self.accept("+"):
                sign = 1.0
            elif self.accept("-"):
                sign = -1.0
            else:
                return terms, const

    def term(self):
        t = self.cur
        if t.kind == "num":
            self.i += 1
            v = float(t.text)
            if self.accept("*"):
                return self.signal(), v
            return None, v
        if t.kind == "ident":
            return self.signal(), 1.0
        raise self.err(f"expected a number or signal name, got {t.text or 'end of input'!r}")

    def signal(self) -> int:
        t = self.cur
        if t.kind != "ident":
            raise self.err("expected a signal name")
        self.i += 1
        idx = _signal_index(t.text, self.signals)
        if idx is None or idx >= self.dim:
            raise self.err(f"unknown signal {t.text!r}", t)
        return idx


def _sub(a, b):
    terms = dict(a[0])
    for k, c in b[0].items():
        terms[k] = terms.get(k, 0.0) - c
    return terms, a[1] - b[1]


def _signal_index(name: str, signals) -> Optional[int]:
    if signals is not None:
        try:
            return list(signals).index(name)
        except ValueError:
            return None
    if name == "x":
        return 0
    m = re.fullmatch(r"x(\d+)", name)
    if m and int(m.group(1)) >= 1:
        return int(m.group(1)) - 1
    return None


def _infer_dim(toks, signals) -> int:
    if signals is not None:
        return len(signals)
    top = 0
    for t in toks:
        if t.kind == "ident":
            idx = _signal_index(t.text, None)
            if idx is not None:
                top = max(top, idx + 1)
    return max(top, 1)


def parse(
    text: str,
    predicates: Optional[Mapping[str, Predicate]] = None,
    signals: Optional[Sequence[str]] = None,
    dim: Optional[int] = None,
) -> Formula:
    """Parse a formula, optionally preceded by predicate declarations.

    ``predicates`` supplies named predicates referenced by bare identifiers.
    ``signals`` names the state dimensions; otherwise ``x1..xn`` are used and
    ``dim`` (default: largest index mentioned) fixes the coefficient length.
    """
    f, _ = parse_with_predicates(text, predicates, signals, dim)
    return f


def parse_with_predicates(text, predicates=None, signals=None, dim=None):
    all_toks = _tokenize(_strip_comments(text))
    if dim is None:
        dim = _infer_dim(all_toks, signals)
    elif signals is not None and len(signals) != dim:
        raise ValueError("dim disagrees with the number of signal names")
    p = _Parser(all_toks, predicates, signals, dim)

    # leading declarations: ident ':=' comparison
    while p.cur.kind == "ident" and p.peek().text == ":=":
        name_tok = p.cur
        if name_tok.text in _KEYWORDS:
            raise p.err(f"cannot declare keyword {name_tok.text!r}")
        p.i += 2
        coeffs, offset = p.comparison()
        if name_tok.text in p.preds and p.preds[name_tok.text] != Predicate(name_tok.text, coeffs, offset):
            raise p.err(f"predicate {name_tok.text!r} redefined", name_tok)
        p.preds[name_tok.text] = Predicate(name_tok.text, coeffs, offset)
        # declarations end at a line break
        if p.cur.kind != "eof" and p.cur.line == name_tok.line:
            raise p.err("declaration must end at the line break")

    if p.cur.kind == "eof":
        raise p.err("missing formula")
    f = p.formula()
    if p.cur.kind != "eof":
        raise p.err(f"unexpected trailing input {p.cur.text!r}")
    return f, p.preds


def _strip_comments(text: str) -> str:
    return "\n".join(line.split("#", 1)[0] for line in text.splitlines())


def load_formula(path, signals=None, dim=None, predicates=None) -> Formula:
    """Read a formula file (declarations then formula)."""
    text = Path(path).read_text(encoding="utf-8")
    return parse(text, predicates=predicates, signals=signals, dim=dim)


# -- printing --------------------------------------------------------------

def _is_plain_name(name: str) -> bool:
    return bool(_IDENT_RE.match(name)) and name not in _KEYWORDS


def _wrap(f: Formula, signals) -> str:
    s = format_formula(f, signals)
    if isinstance(f, (And, Or, Implies, Until)):
        return f"({s})"
    return s


def format_formula(f: Formula, signals: Optional[Sequence[str]] = None) -> str:
    """Render the formula alone; named predicates appear by name."""
    if isinstance(f, TrueF):
        return "true"
    if isinstance(f, Pred):
        p = f.pred
        if _is_plain_name(p.name):
            return p.name
        return f"({comparison_text(p.coeffs, p.offset, signals)})"
    if isinstance(f, Not):
        return "!" + _wrap(f.child, signals)
    if isinstance(f, And):
        return " & ".join(_wrap(a, signals) for a in f.args)
    if isinstance(f, Or):
        return " | ".join(_wrap(a, signals) for a in f.args)
    if isinstance(f, Implies):
        return f"{_wrap(f.lhs, signals)} -> {_wrap(f.rhs, signals)}"
    if isinstance(f, Until):
        return f"{_wrap(f.lhs, signals)} U{f.interval} {_wrap(f.rhs, signals)}"
    if isinstance(f, Eventually):
        return f"F{f.interval} {_wrap(f.child, signals)}"
    if isinstance(f, Always):
        return f"G{f.interval} {_wrap(f.child, signals)}"
    raise TypeError(f"not a formula node: {f!r}")


def to_text(f: Formula, signals: Optional[Sequence[str]] = None) -> str:
    """Full formula-file text: a declaration per named predicate, then the formula.

    Sign-only predicates (no coefficients) get no declaration; parse the
    text back with ``predicates=`` to resolve them.
    """
    lines = []
    for p in predicates_of(f):
        if _is_plain_name(p.name) and p.dim > 0:
            lines.append(f"{p.name} := {comparison_text(p.coeffs, p.offset, signals)}")
    lines.append(format_formula(f, signals))
    return "\n".join(lines) + "\n"
