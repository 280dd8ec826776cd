"""Branch and bound over LP relaxations.

LP relaxations are solved with HiGHS through :func:`scipy.optimize.linprog`.
Branching always picks the lowest-index fractional integer variable, so
results are deterministic. There are no cuts, no presolve and no warm
starts; the target is desk-scale models with at most a few hundred binaries.
"""
from __future__ import annotations

import enum
import heapq
import math
import os
import shlex
import subprocess
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
from scipy.optimize import linprog

from .model import MilpModel, Sense

INT_TOL = 1e-6
FEAS_TOL = 1e-7
SOLVER_ENV = "TIMEROB_SOLVER_CMD"


class Status(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    BUDGET = "budget"


class SolverError(RuntimeError):
    """Numerical trouble or an unbounded relaxation; never swallowed."""


@dataclass
class Budget:
    max_nodes: int = 200_000
    time_limit: float = 300.0


@dataclass
class Solution:
    status: Status
    x: Optional[np.ndarray] = None
    objective: Optional[float] = None
    nodes: int = 0
    wall_time: float = 0.0
    stats: dict = field(default_factory=dict)

    def value(self, expr) -> float:
        from .model import LinExpr

        if self.x is None:
            raise ValueError(f"no assignment (status {self.status.value})")
        return LinExpr.of(expr).value(self.x)

    def int_value(self, expr) -> int:
        v = self.value(expr)
        r = round(v)
        if abs(v - r) > 1e-5:
            raise SolverError(f"expected an integral value, got {v}")
        return int(r)


def solve(model: MilpModel, budget: Optional[Budget] = None) -> Solution:
    """Solve ``model`` to proven optimality or until the budget runs out.

    Nodes are explored depth first until an incumbent exists, then in order
    of their parent's relaxation bound.
    """
    budget = budget or Budget()
    t0 = time.perf_counter()
    c, A_ub, b_ub, A_eq, b_eq, lb0, ub0, integ = model.arrays()
    int_idx = np.nonzero(integ)[0]
    for k in int_idx:
        if not (np.isfinite(lb0[k]) and np.isfinite(ub0[k])):
            raise SolverError(f"integer variable {model.vars[k].name!r} must be bounded")
    lb0 = lb0.copy()
    ub0 = ub0.copy()
    lb0[int_idx] = np.ceil(lb0[int_idx] - INT_TOL)
    ub0[int_idx] = np.floor(ub0[int_idx] + INT_TOL)
    n = len(c)
    options = {"primal_feasibility_tolerance": FEAS_TOL, "dual_feasibility_tolerance": FEAS_TOL}
    has_eq = A_eq.shape[0] > 0
    const = model.objective.const

    def linprog_any(cc, Aub, bub, lb, ub):
        # HiGHS occasionally ends with an unknown model status on tiny
        # margins; the other algorithms sometimes settle it
        for method in ("highs", "highs-ds", "highs-ipm"):
            res = linprog(
                cc,
                A_ub=Aub if Aub.shape[0] else None,
                b_ub=bub if Aub.shape[0] else None,
                A_eq=A_eq if has_eq else None,
                b_eq=b_eq if has_eq else None,
                bounds=np.column_stack([lb, ub]),
                method=method,
                options=options,
            )
            if res.status in (0, 2, 3):
                break
        return res

    def relax(lb, ub):
        if n == 0:
            return 0.0, np.zeros(0)
        res = linprog_any(c, A_ub, b_ub, lb, ub)
        if res.status == 2:
            return None
        if res.status == 3:
            raise SolverError("LP relaxation is unbounded")
        if res.status != 0:
            raise SolverError(f"LP solver failed: {res.message}")
        return float(res.fun), res.x

    def prune_bound(v: float) -> float:
        # integral objectives let us round the relaxation bound
        if model.integral_objective:
            return math.ceil(v - 1e-6)
        return v

    best_x: Optional[np.ndarray] = None
    best = math.inf
    # entries: (parent bound, sequence number, lb, ub)
    open_nodes: list = [(-math.inf, 0, lb0, ub0)]
    seq = 1
    nodes = 0
    status = Status.OPTIMAL
    while open_nodes:
        if nodes >= budget.max_nodes or time.perf_counter() - t0 > budget.time_limit:
            status = Status.BUDGET
            break
        if best_x is None:
            bound, _, lb, ub = open_nodes.pop()
        else:
            bound, _, lb, ub = heapq.heappop(open_nodes)
            if prune_bound(bound) >= best - 1e-9:
                # every remaining node is at least as bad
                open_nodes.clear()
                break
        nodes += 1
        if np.any(lb > ub):
            continue
        got = relax(lb, ub)
        if got is None:
            continue
        val, x = got
        if best_x is not None and prune_bound(val) >= best - 1e-9:
            continue
        frac = np.abs(x[int_idx] - np.round(x[int_idx])) if int_idx.size else np.zeros(0)
        bad = np.nonzero(frac > INT_TOL)[0]
        if bad.size == 0:
            x = x.copy()
            x[int_idx] = np.round(x[int_idx])
            obj = float(c @ x)
            if obj < best:
                best, best_x = obj, x
                heapq.heapify(open_nodes)
            continue
        k = int(int_idx[bad[0]])
        lo_ub = ub.copy()
        lo_ub[k] = math.floor(x[k])
        hi_lb = lb.copy()
        hi_lb[k] = math.ceil(x[k])
        down = (val, seq, lb, lo_ub)
        up = (val, seq + 1, hi_lb, ub)
        seq += 2
        if best_x is not None:
            heapq.heappush(open_nodes, down)
            heapq.heappush(open_nodes, up)
        # depth first: explore the side nearer to the relaxation value first
        elif x[k] - math.floor(x[k]) >= 0.5:
            open_nodes.extend([down, up])
        else:
            open_nodes.extend([up, down])

    wall = time.perf_counter() - t0
    if best_x is None:
        st = Status.INFEASIBLE if status is Status.OPTIMAL else Status.BUDGET
        return Solution(st, nodes=nodes, wall_time=wall)
    obj = -best if model.sense is Sense.MAX else best
    viol = model.violation(best_x)
    if viol > 1e-5:
        raise SolverError(f"incumbent violates the model by {viol:.3g}")
    return Solution(status, best_x, obj + const, nodes=nodes, wall_time=wall)


def solve_highs(model: MilpModel, budget: Optional[Budget] = None) -> Solution:
    """Solve with the HiGHS MIP solver shipped in SciPy (presolve, cuts).

    An alternative to :func:`solve` for models whose relaxations are too
    weak for plain branch and bound. Same status mapping; the returned
    point is re-checked against the model with the same tolerance.
    """
    from scipy.optimize import Bounds, LinearConstraint, milp

    budget = budget or Budget()
    t0 = time.perf_counter()
    c, A_ub, b_ub, A_eq, b_eq, lb, ub, integ = model.arrays()
    cons = []
    if A_ub.shape[0]:
        cons.append(LinearConstraint(A_ub, -np.inf, b_ub))
    if A_eq.shape[0]:
        cons.append(LinearConstraint(A_eq, b_eq, b_eq))
    res = milp(c, constraints=cons, integrality=integ.astype(int), bounds=Bounds(lb, ub),
               options={"time_limit": budget.time_limit, "node_limit": budget.max_nodes,
                        "mip_rel_gap": 0.0})
    wall = time.perf_counter() - t0
    if res.status == 2:
        return Solution(Status.INFEASIBLE, wall_time=wall)
    if res.status == 1:
        if res.x is None:
            return Solution(Status.BUDGET, wall_time=wall)
        status = Status.BUDGET
    elif res.status == 0:
        status = Status.OPTIMAL
    else:
        raise SolverError(f"HiGHS MIP failed: {res.message}")
    x = np.asarray(res.x, dtype=float).copy()
    int_idx = np.nonzero(integ)[0]
    x[int_idx] = np.round(x[int_idx])
    viol = model.violation(x)
    if viol > 1e-5:
        raise SolverError(f"HiGHS solution violates the model by {viol:.3g}")
    nodes = int(getattr(res, "mip_node_count", 0) or 0)
    return Solution(status, x, model.objective_value(x), nodes=nodes, wall_time=wall)


# -- external solvers ------------------------------------------------------------

def read_solution_file(path, model: MilpModel, names: dict[str, int]) -> np.ndarray:
    """Parse ``name value`` lines into an assignment vector.

    Unlisted variables default to 0. Lines starting with ``#`` are ignored.
    """
    x = np.zeros(model.num_vars)
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise SolverError(f"bad solution line: {line!r}")
        if parts[0] not in names:
            raise SolverError(f"solution names unknown variable {parts[0]!r}")
        x[names[parts[0]]] = float(parts[1])
    return x


def solve_external(model: MilpModel, command: Optional[str] = None,
                   timeout: Optional[float] = None) -> Solution:
    """Run an external solver through a command template.

    The template (argument or ``$TIMEROB_SOLVER_CMD``) may use ``{lp}`` and
    ``{sol}``; the process must write ``name value`` lines to ``{sol}``. An
    exit code of 0 with no solution file means infeasible.
    """
    from .lpformat import lp_names, write_lp

    command = command or os.environ.get(SOLVER_ENV)
    if not command:
        raise SolverError(f"no external solver command (set {SOLVER_ENV})")
    t0 = time.perf_counter()
    with tempfile.TemporaryDirectory(prefix="timerob-") as tmp:
        lp = Path(tmp) / "model.lp"
        sol = Path(tmp) / "model.sol"
        write_lp(model, lp)
        argv = [a.format(lp=str(lp), sol=str(sol)) for a in shlex.split(command)]
        proc = subprocess.run(argv, capture_output=True, text=True, timeout=timeout)
        if proc.returncode != 0:
            raise SolverError(f"external solver exited with {proc.returncode}: {proc.stderr.strip()}")
        if not sol.exists():
            return Solution(Status.INFEASIBLE, wall_time=time.perf_counter() - t0)
        names = {nm: i for i, nm in enumerate(lp_names(model))}
        x = read_solution_file(sol, model, names)
    viol = model.violation(x, int_tol=1e-5)
    if viol > 1e-5:
        raise SolverError(f"external solution violates the model by {viol:.3g}")
    return Solution(Status.OPTIMAL, x, model.objective_value(x), wall_time=time.perf_counter() - t0)
