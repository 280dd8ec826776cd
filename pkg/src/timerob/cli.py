"""Command-line front end: ``timerob <command> ...``.

Exit codes: 0 success, 1 domain error (bad input, infeasible scenario,
exhausted budget), 2 internal invariant violation (failed theorem check,
solver/monitor disagreement, numerical solver failure).
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import casestudies, monitor as mon, oracle
from .formula import Fragment, FormulaError
from .milp.encode import EncodingError
from .milp.solver import SolverError, Status
from .parser import ParseError, load_formula
from .signal import ApTrace, apt_csv_text, atomic_write, read_apt_csv, read_trace_csv, trace_csv_text
from .synthesis import (
    ConsistencyViolation,
    ScenarioError,
    build_model,
    load_scenario,
    synthesize,
    validate_result,
    write_result,
)

DOMAIN_ERRORS = (ParseError, ScenarioError, FormulaError, mon.EvaluationError,
                 casestudies.UnknownCaseStudy, OSError, ValueError)
INTERNAL_ERRORS = (ConsistencyViolation, SolverError, EncodingError)


class UsageError(Exception):
    pass


def _need_file(path: str) -> Path:
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"no such file: {path}")
    return p


def _need_parent(path: str) -> Path:
    p = Path(path)
    if not p.parent.exists() and str(p.parent) not in ("", "."):
        raise UsageError(f"output directory does not exist: {p.parent}")
    return p


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


# -- commands ------------------------------------------------------------------

def cmd_monitor(args) -> int:
    fpath = _need_file(args.formula)
    tpath = _need_file(args.trace)
    out = _need_parent(args.out) if args.out else None
    if args.apt:
        apt = read_apt_csv(tpath)
        f = load_formula(fpath, predicates={p.name: p for p in apt.predicates})
        res = mon.monitor(f, apt)
    else:
        trace = read_trace_csv(tpath)
        f = load_formula(fpath, signals=trace.names, dim=trace.dim)
        res = mon.monitor_signal(f, trace)
    csv_text = res.to_csv()
    if out is not None:
        atomic_write(out, csv_text)
    summary = res.summary()
    if args.json:
        _emit(args, summary, "")
    elif out is None:
        sys.stdout.write(csv_text)
    else:
        print(" ".join(f"{k}={v}" for k, v in summary.items()))
    return 0


def cmd_verify(args) -> int:
    frag = None
    if args.fragment:
        frag = {"and-always": Fragment.AND_ALWAYS, "or-eventually": Fragment.OR_EVENTUALLY}[args.fragment]
    reports = oracle.run_suite(args.seed, args.trials, args.theorem or None, frag)
    ok = all(r.passed for r in reports.values())
    payload = {"seed": args.seed, "trials": args.trials, "passed": ok,
               "reports": {k: r.to_dict() for k, r in reports.items()}}
    _emit(args, payload, "\n".join(r.line() for r in reports.values()))
    return 0 if ok else 2


def cmd_synthesize(args) -> int:
    scn = load_scenario(_need_file(args.scenario))
    if args.solver:
        scn.solver = args.solver
    out_dir = Path(args.out_dir)
    if out_dir.exists() and not out_dir.is_dir():
        raise UsageError(f"not a directory: {out_dir}")
    res = synthesize(scn)
    write_result(res, out_dir)
    payload = res.summary()
    if res.status is Status.OPTIMAL:
        rep = validate_result(res, scn)
        payload["violations"] = rep.violations
        if not rep.ok:
            _emit(args, payload, "validation failed: " + "; ".join(rep.violations))
            return 2
    text = f"status={payload['status']} achieved={payload['achieved']} " \
           f"nodes={payload['nodes']} wall_time={payload['wall_time']:.3f}s"
    _emit(args, payload, text)
    return 0 if res.status is Status.OPTIMAL else 1


def cmd_export_lp(args) -> int:
    from .milp.lpformat import write_lp

    scn = load_scenario(_need_file(args.scenario))
    lp = _need_parent(args.lp)
    model = build_model(scn)[0]
    write_lp(model, lp)
    stats = model.stats()
    _emit(args, {"lp": str(lp), **stats}, f"wrote {lp}: " + ", ".join(f"{k}={v}" for k, v in stats.items()))
    return 0


def cmd_casestudy(args) -> int:
    rep = casestudies.report(args.name)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        _write_series(args.name, out)
    _emit(args, rep.to_dict(), rep.text())
    return 0 if rep.passed else 2


def _write_series(name: str, out: Path) -> None:
    # plot-ready data: the input trace plus one monitor CSV per formula
    trace, formulas = casestudies.gen_builtin(name)
    if isinstance(trace, ApTrace):
        atomic_write(out / "apt.csv", apt_csv_text(trace))
    else:
        atomic_write(out / "trace.csv", trace_csv_text(trace))
    for key, f in formulas.items():
        atomic_write(out / f"{key}.csv", mon.monitor_signal(f, trace).to_csv())


# -- entry point -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="timerob", description="Temporal robustness of STL specifications.")
    ap.add_argument("--json", action="store_true", help="print machine-readable JSON summaries")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("monitor", help="satisfaction and robustness series of a formula over a trace")
    p.add_argument("formula", help="formula file")
    p.add_argument("trace", help="trace CSV (t, x1, ...) or, with --apt, a sign CSV")
    p.add_argument("--out", help="write the series CSV here instead of stdout")
    p.add_argument("--apt", action="store_true", help="trace is a +-1 predicate table")
    p.set_defaults(func=cmd_monitor)

    p = sub.add_parser("verify", help="randomized theorem checks against the brute-force oracle")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--fragment", choices=("and-always", "or-eventually"))
    p.add_argument("--theorem", action="append", choices=oracle.THEOREMS,
                   help="restrict to one check (repeatable)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("synthesize", help="solve a synthesis scenario (JSON)")
    p.add_argument("scenario")
    p.add_argument("out_dir")
    p.add_argument("--solver", choices=("bundled", "highs"), help="override the scenario's solver")
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("export-lp", help="write the synthesis model of a scenario in LP format")
    p.add_argument("scenario")
    p.add_argument("lp")
    p.set_defaults(func=cmd_export_lp)

    p = sub.add_parser("casestudy", help="recompute a built-in study and diff against expected values")
    p.add_argument("name", choices=casestudies.NAMES)
    p.add_argument("--out", help="directory for plot-ready CSV series")
    p.set_defaults(func=cmd_casestudy)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except INTERNAL_ERRORS as e:
        print(f"timerob: internal error: {e}", file=sys.stderr)
        return 2
    except UsageError as e:
        print(f"timerob: {e}", file=sys.stderr)
        return 1
    except DOMAIN_ERRORS as e:
        print(f"timerob: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
