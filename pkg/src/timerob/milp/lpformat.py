"""CPLEX LP text format: writer and a reader for the subset it writes.

Variable names are sanitized to LP-legal identifiers and made unique with
an index suffix, so ``read_lp(write_lp(m))`` reproduces ``m`` up to naming.
Variables are emitted in declaration order.
"""
from __future__ import annotations

import math
import re
from pathlib import Path

from .model import Constraint, LinExpr, MilpModel, ModelError, Sense, VarKind

_MAX_LINE = 250
_ILLEGAL = re.compile(r"[^A-Za-z0-9_.]")


def lp_names(model: MilpModel) -> list[str]:
    """LP-safe variable names. Legal names are kept; others are sanitized
    and tagged with the variable index, so writing a model that was read
    back from LP text reproduces the same names."""
    legal = [v.name for v in model.vars if _legal(v.name)]
    taken = set(legal)
    out = []
    for v in model.vars:
        if _legal(v.name):
            out.append(v.name)
            continue
        base = _ILLEGAL.sub("_", v.name).strip("_") or "v"
        if not base[0].isalpha():
            base = "v" + base
        name = f"{base}_{v.index}"
        while name in taken:
            name += "_"
        taken.add(name)
        out.append(name)
    return out


_KEYWORDS = {"st", "end", "free", "inf", "infinity", "bounds", "binary", "binaries",
             "general", "generals", "minimize", "maximize", "subject", "to", "s.t."}


def _legal(name: str) -> bool:
    return (bool(name) and name[0].isalpha() and not _ILLEGAL.search(name)
            and len(name) <= 255 and name.lower() not in _KEYWORDS)


def _num(v: float) -> str:
    if v == math.inf:
        return "+inf"
    if v == -math.inf:
        return "-inf"
    return repr(float(v)) if not float(v).is_integer() else str(int(v))


def _terms(terms: dict, names: list[str]) -> list[str]:
    out = []
    for k in sorted(terms):
        c = terms[k]
        sign = "-" if c < 0 else "+"
        out.append(f"{sign} {_num(abs(c))} {names[k]}")
    return out


def _wrap(head: str, parts: list[str]) -> list[str]:
    lines, cur = [], head
    for p in parts:
        if len(cur) + len(p) + 1 > _MAX_LINE:
            lines.append(cur)
            cur = "   "
        cur += " " + p
    lines.append(cur)
    return lines


def lp_text(model: MilpModel) -> str:
    names = lp_names(model)
    out = [f"\\ {model.name}"]
    if model.objective.const:
        out.append(f"\\ objective constant: {_num(model.objective.const)}")
    if model.integral_objective:
        out.append("\\ integral objective")
    out.append("Maximize" if model.sense is Sense.MAX else "Minimize")
    obj_terms = _terms({k: v for k, v in model.objective.terms.items() if v != 0}, names)
    out += _wrap(" obj:", obj_terms or [f"0 {names[0]}"] if model.vars else [])
    out.append("Subject To")
    sense = {"<=": "<=", ">=": ">=", "==": "="}
    for i, con in enumerate(model.constraints):
        parts = _terms(con.terms, names) + [sense[con.sense], _num(con.rhs)]
        out += _wrap(f" r{i}:", parts)
    out.append("Bounds")
    for v, nm in zip(model.vars, names):
        # every variable is listed, in index order, so a reader recovers the order
        if v.lb == -math.inf and v.ub == math.inf:
            out.append(f" {nm} free")
        else:
            out.append(f" {_num(v.lb)} <= {nm} <= {_num(v.ub)}")
    bins = [nm for v, nm in zip(model.vars, names) if v.kind is VarKind.BINARY]
    gens = [nm for v, nm in zip(model.vars, names) if v.kind is VarKind.INTEGER]
    out.append("Binaries")
    if bins:
        out += _wrap("", bins)
    out.append("Generals")
    if gens:
        out += _wrap("", gens)
    out.append("End")
    return "\n".join(out) + "\n"


def write_lp(model: MilpModel, path) -> None:
    from ..signal import atomic_write

    atomic_write(path, lp_text(model))


export_lp = write_lp


_SECTIONS = {
    "maximize": "obj", "maximum": "obj", "max": "obj",
    "minimize": "obj", "minimum": "obj", "min": "obj",
    "subject to": "st", "such that": "st", "st": "st", "s.t.": "st",
    "bounds": "bounds", "bound": "bounds",
    "binaries": "bin", "binary": "bin", "bin": "bin",
    "generals": "gen", "general": "gen", "gen": "gen",
    "end": "end",
}
_TOKEN = re.compile(r"\s*([<>=]=?|=[<>]|[+-]|[A-Za-z_][A-Za-z0-9_.]*|[+-]?inf(?:inity)?|\d+\.?\d*(?:[eE][-+]?\d+)?|\.\d+(?:[eE][-+]?\d+)?|:)")


def _tokens(s: str) -> list[str]:
    pos, out = 0, []
    s = s.rstrip()
    while pos < len(s):
        m = _TOKEN.match(s, pos)
        if not m:
            raise ModelError(f"cannot parse LP text near {s[pos:pos + 20]!r}")
        out.append(m.group(1))
        pos = m.end()
    return out


def _is_num(tok: str) -> bool:
    try:
        float(tok)
        return True
    except ValueError:
        return False


def _linear(toks: list[str], var_of) -> dict:
    terms: dict[int, float] = {}
    sign, coef = 1.0, None
    for tok in toks:
        if tok in "+-":
            sign = -1.0 if tok == "-" else 1.0
        elif _is_num(tok):
            coef = float(tok)
        else:
            k = var_of(tok)
            terms[k] = terms.get(k, 0.0) + sign * (1.0 if coef is None else coef)
            sign, coef = 1.0, None
    return terms


def read_lp(path_or_text) -> MilpModel:
    """Parse LP text (a path or the text itself) into a :class:`MilpModel`."""
    text = str(path_or_text)
    if "\n" not in text and Path(text).exists():
        text = Path(text).read_text(encoding="utf-8")
    model = MilpModel()
    const = 0.0
    integral = False
    section = None
    buf: dict[str, list[str]] = {"obj": [], "st": [], "bounds": [], "bin": [], "gen": []}
    for raw in text.splitlines():
        if raw.startswith("\\"):
            m = re.match(r"\\\s*objective constant:\s*(\S+)", raw)
            if m:
                const = float(m.group(1))
            if raw.strip() == "\\ integral objective":
                integral = True
            continue
        line = raw.strip()
        key = line.lower()
        if key in _SECTIONS:
            section = _SECTIONS[key]
            if section == "obj":
                model.sense = Sense.MAX if key.startswith("max") else Sense.MIN
            if section == "end":
                break
            continue
        if not line or section is None:
            continue
        # continuation lines start with whitespace
        if raw[:1].isspace() and raw.startswith("   ") and buf[section] and section in ("obj", "st"):
            buf[section][-1] += " " + line
        else:
            buf[section].append(line)

    order: list[str] = []
    declared: dict[str, list] = {}

    def note(name):
        if name not in declared:
            declared[name] = [0.0, math.inf, VarKind.CONTINUOUS]
            order.append(name)
        return name

    # bounds first: the writer lists every variable there in index order
    for line in buf["bounds"]:
        toks = _tokens(line)
        toks = _merge_signed(toks)
        if len(toks) == 2 and toks[1].lower() == "free":
            note(toks[0])
            declared[toks[0]][:2] = [-math.inf, math.inf]
        elif len(toks) == 5:
            lo, _, nm, _, hi = toks
            note(nm)
            declared[nm][:2] = [float(lo), float(hi)]
        elif len(toks) == 3:
            a, op, b = toks
            nm, val, op = (a, float(b), op) if not _is_num(a) else (b, float(a), _flip(op))
            note(nm)
            if op in ("<=", "<", "=<"):
                declared[nm][1] = val
            elif op in (">=", ">", "=>"):
                declared[nm][0] = val
            else:
                declared[nm][:2] = [val, val]
        else:
            raise ModelError(f"cannot parse bound: {line!r}")
    obj_toks = []
    for line in buf["obj"]:
        toks = _tokens(line)
        if len(toks) > 1 and toks[1] == ":":
            toks = toks[2:]
        obj_toks += toks
    rows = []
    for line in buf["st"]:
        toks = _tokens(line)
        name = None
        if len(toks) > 1 and toks[1] == ":":
            name, toks = toks[0], toks[2:]
        i = next((j for j, t in enumerate(toks) if t in ("<=", ">=", "=", "=<", "=>", "<", ">")), None)
        if i is None:
            raise ModelError(f"constraint without sense: {line!r}")
        rhs_toks = toks[i + 1:]
        rhs = float("".join(rhs_toks))
        s = {"<": "<=", "=<": "<=", ">": ">=", "=>": ">=", "=": "=="}.get(toks[i], toks[i])
        rows.append((name, toks[:i], s, rhs))
        for t in toks[:i]:
            if not (t in "+-" or _is_num(t)):
                note(t)
    for t in obj_toks:
        if not (t in "+-" or _is_num(t)):
            note(t)
    for kind, sec in ((VarKind.BINARY, "bin"), (VarKind.INTEGER, "gen")):
        for line in buf[sec]:
            for nm in line.split():
                note(nm)
                declared[nm][2] = kind
                if kind is VarKind.BINARY and declared[nm][1] == math.inf:
                    declared[nm][:2] = [0.0, 1.0]
    index = {}
    for nm in order:
        lo, hi, kind = declared[nm]
        index[nm] = model.add_var(nm, kind, lo, hi).index
    for name, lhs, s, rhs in rows:
        terms = _linear(lhs, index.__getitem__)
        model.constraints.append(Constraint(terms, s, rhs, name or f"c{len(model.constraints)}"))
    model.objective = LinExpr(_linear(obj_toks, index.__getitem__), const)
    model.integral_objective = integral
    return model


def _merge_signed(toks):
    out = []
    i = 0
    while i < len(toks):
        if toks[i] in "+-" and i + 1 < len(toks) and (_is_num(toks[i + 1]) or toks[i + 1].lower().startswith("inf")):
            v = toks[i + 1]
            out.append(("-" if toks[i] == "-" else "") + v)
            i += 2
        else:
            out.append(toks[i])
            i += 1
    return out


def _flip(op):
    return {"<=": ">=", ">=": "<=", "<": ">", ">": "<", "=<": "=>", "=>": "=<"}.get(op, op)
