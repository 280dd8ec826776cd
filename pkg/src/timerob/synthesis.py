"""Temporally robust control synthesis for discrete-time linear systems.

Given ``x_{t+1} = A x_t + B u_t`` with box constraints on states and inputs,
find inputs ``u_0 .. u_{H-1}`` that maximize the synchronous or asynchronous
temporal robustness of a formula at ``t = 0``, subject to a positive floor.

Every optimal answer passes through a consistency gate: the returned
trajectory is monitored with :mod:`timerob.monitor` and the value must equal
the solver's objective. A mismatch means the encoding is wrong, so it raises
:class:`ConsistencyViolation` instead of returning.
"""
from __future__ import annotations

import enum
import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import monitor as mon
from .extint import ExtInt, format_value
from .formula import Formula, formula_horizon, predicates_of
from .milp.encode import Encoder, StateVars
from .milp.model import LinExpr, MilpModel, Sense
from .milp.solver import Budget, Solution, Status, solve, solve_external, solve_highs
from .parser import load_formula, parse
from .signal import Trace, evaluate_predicates

SAT_MARGIN = 1e-6
SOLVERS = ("bundled", "highs")
DYN_TOL = 1e-8


class ConsistencyViolation(RuntimeError):
    """Solver objective and monitored robustness disagree."""


class ScenarioError(ValueError):
    pass


class Objective(enum.Enum):
    ETA_PLUS = "eta_plus"
    ETA_MINUS = "eta_minus"
    THETA_PLUS = "theta_plus"
    THETA_MINUS = "theta_minus"

    @property
    def side(self) -> mon.Side:
        return mon.Side.PLUS if self.value.endswith("plus") else mon.Side.MINUS

    @property
    def synchronous(self) -> bool:
        return self.value.startswith("eta")


@dataclass
class LinearSystem:
    A: np.ndarray
    B: np.ndarray
    x0: np.ndarray
    state_bounds: np.ndarray  # n x 2
    input_bounds: np.ndarray  # m x 2

    def __post_init__(self):
        self.A = np.atleast_2d(np.asarray(self.A, dtype=float))
        self.B = np.atleast_2d(np.asarray(self.B, dtype=float))
        self.x0 = np.atleast_1d(np.asarray(self.x0, dtype=float))
        self.state_bounds = np.atleast_2d(np.asarray(self.state_bounds, dtype=float))
        self.input_bounds = np.atleast_2d(np.asarray(self.input_bounds, dtype=float))
        n = self.A.shape[0]
        if self.A.shape != (n, n):
            raise ScenarioError(f"A must be square, got {self.A.shape}")
        if self.B.shape[0] != n:
            raise ScenarioError(f"B has {self.B.shape[0]} rows, A has {n}")
        if self.x0.shape != (n,):
            raise ScenarioError(f"x0 has length {self.x0.size}, expected {n}")
        if self.state_bounds.shape != (n, 2) or self.input_bounds.shape != (self.m, 2):
            raise ScenarioError("bounds must be [lo, hi] pairs per state / input dimension")
        for name, b in (("state", self.state_bounds), ("input", self.input_bounds)):
            if not np.all(np.isfinite(b)) or np.any(b[:, 0] > b[:, 1]):
                raise ScenarioError(f"{name} bounds must be finite with lo <= hi")
        if np.any(self.x0 < self.state_bounds[:, 0]) or np.any(self.x0 > self.state_bounds[:, 1]):
            raise ScenarioError("x0 lies outside the state bounds")

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.B.shape[1]

    def simulate(self, inputs) -> np.ndarray:
        u = np.atleast_2d(np.asarray(inputs, dtype=float))
        xs = [self.x0]
        for ut in u:
            xs.append(self.A @ xs[-1] + self.B @ ut)
        return np.array(xs)


@dataclass
class Scenario:
    system: LinearSystem
    formula: Formula
    H: int
    objective: Objective = Objective.ETA_PLUS
    theta_star: int = 1
    budget: Budget = field(default_factory=Budget)
    solver_command: Optional[str] = None
    # "bundled" (branch and bound in this package) or "highs" (SciPy's MIP)
    solver: str = "bundled"
    signals: Optional[tuple] = None
    # optional polytope rows a . x_t <= b applied at every t
    state_rows: list = field(default_factory=list)

    def __post_init__(self):
        self.objective = Objective(self.objective) if not isinstance(self.objective, Objective) else self.objective
        if self.H < formula_horizon(self.formula):
            raise ScenarioError(f"H={self.H} is below the formula horizon {formula_horizon(self.formula)}")
        if self.solver not in SOLVERS:
            raise ScenarioError(f"unknown solver {self.solver!r}; choose from {', '.join(SOLVERS)}")
        if int(self.theta_star) != self.theta_star or self.theta_star < 1:
            raise ScenarioError("theta_star must be an integer >= 1")
        for p in predicates_of(self.formula):
            if p.dim != self.system.n:
                raise ScenarioError(f"predicate {p.name!r} has dimension {p.dim}, system has {self.system.n}")


@dataclass
class SynthesisResult:
    status: Status
    inputs: Optional[np.ndarray] = None
    trajectory: Optional[Trace] = None
    achieved: Optional[ExtInt] = None
    objective: Optional[float] = None
    wall_time: float = 0.0
    nodes: int = 0
    model_stats: dict = field(default_factory=dict)

    def summary(self) -> dict:
        return {
            "status": self.status.value,
            "achieved": None if self.achieved is None else format_value(self.achieved),
            "wall_time": round(self.wall_time, 6),
            "nodes": self.nodes,
            "model": self.model_stats,
        }


def system_constraints(model: MilpModel, sys: LinearSystem, H: int, state_rows=()):
    """State variables ``x_0..x_H``, inputs ``u_0..u_{H-1}`` and dynamics rows."""
    lo, hi = sys.state_bounds[:, 0], sys.state_bounds[:, 1]
    xs = [[model.add_var(f"x[{t},{i}]", lb=lo[i], ub=hi[i]) for i in range(sys.n)] for t in range(H + 1)]
    us = [[model.add_var(f"u[{t},{j}]", lb=sys.input_bounds[j, 0], ub=sys.input_bounds[j, 1])
           for j in range(sys.m)] for t in range(H)]
    for i in range(sys.n):
        model.add_constr(xs[0][i], "==", sys.x0[i], name=f"init[{i}]")
    for t in range(H):
        for i in range(sys.n):
            rhs = LinExpr()
            for k in range(sys.n):
                if sys.A[i, k]:
                    rhs = rhs + xs[t][k] * sys.A[i, k]
            for j in range(sys.m):
                if sys.B[i, j]:
                    rhs = rhs + us[t][j] * sys.B[i, j]
            model.add_constr(xs[t + 1][i] - rhs, "==", 0, name=f"dyn[{t},{i}]")
    for r, row in enumerate(state_rows):
        a, b = np.asarray(row[:-1], dtype=float), float(row[-1])
        for t in range(H + 1):
            model.add_constr(sum((xs[t][i] * a[i] for i in range(sys.n) if a[i]), LinExpr()), "<=", b,
                             name=f"poly{r}[{t}]")
    state = StateVars([[LinExpr.of(v) for v in row] for row in xs],
                      np.tile(lo, (H + 1, 1)), np.tile(hi, (H + 1, 1)))
    return state, xs, us


def build_model(scn: Scenario) -> tuple[MilpModel, LinExpr, list, list]:
    """Full synthesis model; returns ``(model, robustness_at_0, xs, us)``."""
    model = MilpModel("synthesis")
    state, xs, us = system_constraints(model, scn.system, scn.H, scn.state_rows)
    enc = Encoder(model, state, scn.H, sat_margin=SAT_MARGIN)
    side = scn.objective.side
    if scn.objective.synchronous:
        rob = enc.sync(scn.formula, side).eta[0]
    else:
        from .milp.encode import milp_async

        # the root is maximized, so one-sided min/max rows suffice
        rob = milp_async(model, scn.formula, state, scn.H, side, encoder=enc, polarity=1).eta[0]
    rob = LinExpr.of(rob)
    model.add_constr(rob, ">=", scn.theta_star, name="robustness_floor")
    model.set_objective(rob, Sense.MAX, integral=True)
    return model, rob, xs, us


def _monitor_value(scn: Scenario, traj: Trace) -> ExtInt:
    apt = evaluate_predicates(traj, predicates_of(scn.formula))
    side = scn.objective.side
    series = mon.eta_series(scn.formula, apt, side) if scn.objective.synchronous else \
        mon.theta_series(scn.formula, apt, side)
    return series.at(0)


def synthesize(scn: Scenario) -> SynthesisResult:
    t0 = time.perf_counter()
    model, rob, xs, us = build_model(scn)
    command = scn.solver_command
    if command:
        sol: Solution = solve_external(model, command)
    elif scn.solver == "highs":
        sol = solve_highs(model, scn.budget)
    else:
        sol = solve(model, scn.budget)
    res = SynthesisResult(sol.status, nodes=sol.nodes, model_stats=model.stats())
    if sol.x is None:
        res.wall_time = time.perf_counter() - t0
        return res
    x = np.array([[sol.value(v) for v in row] for row in xs])
    u = np.array([[sol.value(v) for v in row] for row in us]).reshape(scn.H, scn.system.m)
    res.inputs = u
    res.trajectory = Trace(x, scn.signals)
    res.objective = sol.value(rob)
    achieved = _monitor_value(scn, res.trajectory)
    res.achieved = achieved
    res.wall_time = time.perf_counter() - t0
    if abs(float(achieved) - res.objective) > 1e-6:
        raise ConsistencyViolation(
            f"solver objective {res.objective} but monitored {scn.objective.value} is {achieved}"
        )
    return res


@dataclass
class ValidationReport:
    dynamics_residual: float
    bound_violation: float
    monitored: Optional[ExtInt]
    violations: list

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_result(res: SynthesisResult, scn: Scenario) -> ValidationReport:
    """Independent checks on an optimal result; violations are listed, not raised."""
    from . import oracle
    from .signal import shift_sync

    if res.status is not Status.OPTIMAL or res.trajectory is None:
        return ValidationReport(float("nan"), float("nan"), None, ["result is not optimal"])
    sysm = scn.system
    x = res.trajectory.samples
    viol = []
    resid = 0.0
    for t in range(scn.H):
        resid = max(resid, float(np.max(np.abs(x[t + 1] - sysm.A @ x[t] - sysm.B @ res.inputs[t]))))
    resid = max(resid, float(np.max(np.abs(x[0] - sysm.x0))))
    if resid > DYN_TOL:
        viol.append(f"dynamics residual {resid:.3g}")
    lo, hi = sysm.state_bounds[:, 0], sysm.state_bounds[:, 1]
    ulo, uhi = sysm.input_bounds[:, 0], sysm.input_bounds[:, 1]
    bound = max(float(np.max(lo - x)), float(np.max(x - hi)),
                float(np.max(ulo - res.inputs)), float(np.max(res.inputs - uhi)), 0.0)
    if bound > 1e-7:
        viol.append(f"bounds violated by {bound:.3g}")
    monitored = _monitor_value(scn, res.trajectory)
    if res.achieved is None or monitored != res.achieved:
        viol.append(f"monitored {monitored} != achieved {res.achieved}")
    apt = evaluate_predicates(res.trajectory, predicates_of(scn.formula))
    f = scn.formula
    if mon.chi(f, apt, 0) != 1:
        viol.append("trajectory does not satisfy the formula at t=0")
    side = scn.objective.side
    eta0 = mon.eta_series(f, apt, side).values[0]
    theta0 = mon.theta_series(f, apt, side).values[0]
    h_eff = apt.horizon - formula_horizon(f)
    censored = (abs(eta0) >= h_eff) if side is mon.Side.PLUS else True
    if not censored and abs(theta0) > abs(eta0):
        viol.append(f"|theta| {theta0} exceeds |eta| {eta0}")
    if scn.objective is Objective.ETA_PLUS:
        r = int(abs(float(res.achieved)))
        for h in range(min(r, h_eff) + 1):
            if oracle.brute_chi(f, shift_sync(apt, h), 0) != 1:
                viol.append(f"early shift by {h} breaks satisfaction")
    return ValidationReport(resid, bound, monitored, viol)


# -- scenario files ----------------------------------------------------------

def scenario_from_dict(d: dict, base_dir: Optional[Path] = None) -> Scenario:
    try:
        sysm = LinearSystem(d["A"], d["B"], d["x0"], d["state_bounds"], d["input_bounds"])
        signals = tuple(d["signals"]) if d.get("signals") else None
        if "formula" in d:
            f = parse(d["formula"], signals=signals, dim=sysm.n)
        elif "formula_file" in d:
            path = Path(d["formula_file"])
            if base_dir is not None and not path.is_absolute():
                path = base_dir / path
            f = load_formula(path, signals=signals, dim=sysm.n)
        else:
            raise ScenarioError("scenario needs 'formula' or 'formula_file'")
        b = d.get("budget", {})
        return Scenario(
            sysm, f, int(d["H"]),
            objective=Objective(d.get("objective", "eta_plus")),
            theta_star=int(d.get("theta_star", 1)),
            budget=Budget(int(b.get("max_nodes", Budget.max_nodes)),
                          float(b.get("time_limit", Budget.time_limit))),
            solver_command=d.get("solver_command"),
            solver=d.get("solver", "bundled"),
            signals=signals,
            state_rows=list(d.get("state_rows", [])),
        )
    except KeyError as e:
        raise ScenarioError(f"scenario is missing field {e.args[0]!r}") from None


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ScenarioError(f"{path}: {e}") from None
    return scenario_from_dict(data, path.parent)


def write_result(res: SynthesisResult, out_dir) -> None:
    """inputs.csv, trajectory.csv and summary.json under ``out_dir``."""
    from .signal import atomic_write, trace_csv_text

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if res.inputs is not None:
        lines = ["t," + ",".join(f"u{j + 1}" for j in range(res.inputs.shape[1]))]
        for t, row in enumerate(res.inputs):
            lines.append(f"{t}," + ",".join(repr(float(v)) for v in row))
        atomic_write(out / "inputs.csv", "\n".join(lines) + "\n")
        atomic_write(out / "trajectory.csv", trace_csv_text(res.trajectory))
    atomic_write(out / "summary.json", json.dumps(res.summary(), indent=2) + "\n")
