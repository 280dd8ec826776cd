"""Built-in case studies with known answers.

``running-example`` is a ten-sample, two-predicate sign trace small enough
to tabulate by hand. ``sine`` is the pair ``x1 = sin(at) + sin(2at)``,
``x2 = cos(at) - cos(2at)`` for ``t = 0..100`` with four specifications.
:func:`report` recomputes every tabulated value and diffs it against the
expected numbers stored here.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import monitor as mon
from .formula import And, Formula, Or, Pred, Predicate
from .parser import parse
from .signal import ApTrace, Trace

NAMES = ("running-example", "sine")

CHI_P = (1, 1, 1, -1, -1, -1, -1, 1, 1, 1)
CHI_Q = (1, 1, -1, -1, -1, 1, 1, -1, 1, 1)

# expected rows; counters carry one extra boundary entry past the window
RUNNING_EXPECTED = {
    "chi_phi": [1, 1, -1, -1, -1, -1, -1, -1, 1, 1],
    "c1": [2, 1, 0, 0, 0, 0, 0, 0, 2, 1, 0],
    "c0": [0, 0, -6, -5, -4, -3, -2, -1, 0, 0, 0],
    "c1_hat": [1, 0, 0, 0, 0, 0, 0, 0, 1, 0],
    "c0_hat": [0, 0, -5, -4, -3, -2, -1, 0, 0, 0],
    "eta_plus": [1, 0, -5, -4, -3, -2, -1, 0, 1, 0],
    "theta_plus_p": [2, 1, 0, -3, -2, -1, 0, 2, 1, 0],
    "theta_plus_q": [1, 0, -2, -1, 0, 1, 0, 0, 1, 0],
    "theta_plus": [1, 0, -2, -3, -2, -1, 0, 0, 1, 0],
}

SINE_A = 0.1
SINE_H = 100
SINE_FORMULAS = {
    "phi1": "G[0,15] (x1 >= -0.2)",
    "phi2": "G[0,30] (x1 >= -0.2)",
    "phi3": "G[0,5] ((x1 >= 0.1) -> G[45,50] (x1 <= -0.5))",
    "phi4": "G[0,10] ((x1 <= 0) | (x2 >= 0))",
}
# (eta_plus(0), theta_plus(0))
SINE_EXPECTED = {
    "phi1": (7, 7),
    "phi2": (-70, -6),
    "phi3": (6, 6),
    "phi4": (21, 10),
}


class UnknownCaseStudy(KeyError):
    pass


def running_example() -> tuple[ApTrace, dict[str, Formula]]:
    apt = ApTrace.from_rows({"p": CHI_P, "q": CHI_Q})
    p, q = (Pred(pr) for pr in apt.predicates)
    return apt, {"p": p, "q": q, "phi": And((p, q)), "p_or_q": Or((p, q))}


def sine_trace(a: float = SINE_A, H: int = SINE_H) -> Trace:
    t = np.arange(H + 1)
    x1 = np.sin(a * t) + np.sin(2 * a * t)
    x2 = np.cos(a * t) - np.cos(2 * a * t)
    return Trace(np.column_stack([x1, x2]), ("x1", "x2"))


def sine_formulas() -> dict[str, Formula]:
    return {k: parse(v, signals=("x1", "x2")) for k, v in SINE_FORMULAS.items()}


def gen_builtin(name: str):
    """``(trace, formulas)`` for a built-in study; the trace is an ApTrace
    for the running example and a real-valued Trace for ``sine``."""
    if name == "running-example":
        return running_example()
    if name == "sine":
        return sine_trace(), sine_formulas()
    raise UnknownCaseStudy(f"unknown case study {name!r}; choose from {', '.join(NAMES)}")


@dataclass
class StudyReport:
    name: str
    rows: dict = field(default_factory=dict)       # label -> list of values
    expected: dict = field(default_factory=dict)
    mismatches: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.mismatches

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "rows": self.rows,
                "expected": self.expected, "mismatches": self.mismatches}

    def text(self) -> str:
        width = max(len(k) for k in self.rows) if self.rows else 0
        lines = [f"# {self.name}"]
        for k, vals in self.rows.items():
            mark = "" if vals == self.expected.get(k, vals) else "   <-- expected " + " ".join(
                str(v) for v in self.expected[k])
            lines.append(f"{k:<{width}}  " + " ".join(f"{v:>4}" for v in vals) + mark)
        lines.append("all values match" if self.passed else f"{len(self.mismatches)} mismatching rows")
        return "\n".join(lines) + "\n"


def _running_counters(apt: ApTrace, phi: Formula) -> dict:
    # realize the sign rows as a two-dimensional state with thresholds at
    # zero, then read the counter rows from a solved sync model
    from .milp import MilpModel, fixed_state, milp_sync, solve
    from .milp.solver import Status

    preds = [Predicate(n, tuple(1.0 if j == k else 0.0 for j in range(len(apt.names))), 0.0)
             for k, n in enumerate(apt.names)]
    f = And(tuple(Pred(p) for p in preds)) if isinstance(phi, And) else phi
    model = MilpModel("running-example")
    idx = milp_sync(model, f, fixed_state(apt.values.T.astype(float)), apt.horizon)
    sol = solve(model)
    if sol.status is not Status.OPTIMAL:
        raise RuntimeError(f"running-example model is {sol.status.value}")
    c1, c0 = idx.counter_rows()
    get = lambda es: [sol.int_value(e) for e in es]  # noqa: E731
    return {"c1": get(c1), "c0": get(c0), "c1_hat": get(idx.c1_hat),
            "c0_hat": get(idx.c0_hat), "eta_plus_milp": get(idx.eta)}


def report(name: str) -> StudyReport:
    """Recompute a study's tabulated values and compare with the expected ones."""
    rep = StudyReport(name)
    if name == "running-example":
        apt, fs = running_example()
        phi = fs["phi"]
        rep.rows["chi_p"] = list(CHI_P)
        rep.rows["chi_q"] = list(CHI_Q)
        rep.rows["chi_phi"] = [int(v) for v in mon.chi_series(phi, apt).values]
        rep.rows.update({k: v for k, v in _running_counters(apt, phi).items() if k != "eta_plus_milp"})
        rep.rows["eta_plus"] = mon.eta_series(phi, apt).as_ints()
        rep.rows["theta_plus_p"] = mon.theta_series(fs["p"], apt).as_ints()
        rep.rows["theta_plus_q"] = mon.theta_series(fs["q"], apt).as_ints()
        rep.rows["theta_plus"] = mon.theta_series(phi, apt).as_ints()
        rep.expected = {"chi_p": list(CHI_P), "chi_q": list(CHI_Q), **RUNNING_EXPECTED}
    elif name == "sine":
        trace, fs = gen_builtin("sine")
        for k, f in fs.items():
            res = mon.monitor_signal(f, trace)
            rep.rows[k] = [int(res.eta_plus.at(0)), int(res.theta_plus.at(0))]
            rep.expected[k] = list(SINE_EXPECTED[k])
    else:
        gen_builtin(name)  # raises
    for k, want in rep.expected.items():
        if rep.rows.get(k) != want:
            rep.mismatches.append({"row": k, "got": rep.rows.get(k), "expected": want})
    return rep
