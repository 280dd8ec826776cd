"""Choosing inputs for a 1-D integrator that maximize temporal robustness.

x[t+1] = x[t] + u[t] with |u| <= 1, starting at 0. The formula asks the
state to reach 1.5 and stay there for three samples within the first four
steps, while never exceeding 3.5 in the first seven. Maximizing eta+ and
theta+ gives inputs that satisfy it as early and as firmly as possible.
"""
import numpy as np

from timerob.oracle import lattice_optimum
from timerob.parser import parse
from timerob.synthesis import LinearSystem, Scenario, synthesize, validate_result

system = LinearSystem(A=[[1.0]], B=[[1.0]], x0=[0.0], state_bounds=[[-10, 10]], input_bounds=[[-1, 1]])
formula = parse("F[0,3] G[0,2] (x1 >= 1.5) & G[0,6] (x1 <= 3.5)", dim=1)

for objective in ("eta_plus", "theta_plus"):
    scn = Scenario(system, formula, H=11, objective=objective)
    res = synthesize(scn)
    check = validate_result(res, scn)
    print(f"{objective}: {res.status.value}, robustness {res.achieved}, "
          f"{res.nodes} nodes, {res.model_stats['binary']} binaries, {res.wall_time:.2f}s")
    print("  inputs    ", np.round(res.inputs[:, 0], 3).tolist())
    print("  trajectory", np.round(res.trajectory.samples[:, 0], 3).tolist())
    print("  validation", "ok" if check.ok else check.violations)
    # The lattice search only allows u in {-1, 0, 1}, so it is a lower bound
    # in general; here it reaches the same value.
    lat = lattice_optimum(scn, (-1.0, 0.0, 1.0))
    print(f"  lattice optimum {lat.value} over {lat.classes} sign-history classes")

# Raising the floor above the optimum makes the problem infeasible.
hard = Scenario(system, formula, H=11, objective="theta_plus", theta_star=9)
print("theta_star=9:", synthesize(hard).status.value)
