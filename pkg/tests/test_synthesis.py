import json

import numpy as np
import pytest

from timerob.milp import Status
from timerob.oracle import lattice_optimum
from timerob.parser import parse
from timerob.synthesis import (
    LinearSystem, Objective, Scenario, ScenarioError, build_model, load_scenario,
    scenario_from_dict, synthesize, validate_result, write_result,
)


def integrator(x0=0.0):
    return LinearSystem([[1.0]], [[1.0]], [x0], [[-10, 10]], [[-1, 1]])


def test_hold_above_threshold():
    scn = Scenario(integrator(2.0), parse("G[0,4] (x1 >= 1)", dim=1), 8, objective="eta_plus")
    res = synthesize(scn)
    assert res.status is Status.OPTIMAL
    assert int(res.achieved) == 4
    assert validate_result(res, scn).ok


def test_async_objective():
    scn = Scenario(integrator(2.0), parse("G[0,4] (x1 >= 1)", dim=1), 8, objective="theta_plus")
    res = synthesize(scn)
    assert int(res.achieved) == 4
    assert validate_result(res, scn).ok


def test_floor_above_the_optimum_is_infeasible():
    scn = Scenario(integrator(2.0), parse("G[0,4] (x1 >= 1)", dim=1), 8, theta_star=10)
    res = synthesize(scn)
    assert res.status is Status.INFEASIBLE
    assert res.inputs is None
    assert validate_result(res, scn).violations == ["result is not optimal"]


@pytest.mark.parametrize("objective", ["eta_plus", "theta_plus"])
def test_matches_lattice_oracle(objective):
    f = parse("F[0,3] G[0,2] (x1 >= 1.5) & G[0,6] (x1 <= 3.5)", dim=1)
    scn = Scenario(integrator(), f, 10, objective=objective)
    res = synthesize(scn)
    lat = lattice_optimum(scn, (-1.0, 0.0, 1.0))
    assert res.status is Status.OPTIMAL
    assert res.achieved == lat.value
    assert validate_result(res, scn).ok


def test_highs_backend_matches_bundled():
    f = parse("F[0,3] G[0,2] (x1 >= 1.5) & G[0,6] (x1 <= 3.5)", dim=1)
    a = synthesize(Scenario(integrator(), f, 10, objective="theta_plus"))
    b = synthesize(Scenario(integrator(), f, 10, objective="theta_plus", solver="highs"))
    assert a.achieved == b.achieved


def test_validation_flags_tampered_results():
    scn = Scenario(integrator(2.0), parse("G[0,4] (x1 >= 1)", dim=1), 8)
    res = synthesize(scn)
    res.inputs = res.inputs + 0.25
    assert any("dynamics" in v for v in validate_result(res, scn).violations)


def test_model_has_floor_row():
    scn = Scenario(integrator(2.0), parse("G[0,4] (x1 >= 1)", dim=1), 8)
    model = build_model(scn)[0]
    assert any(c.name == "robustness_floor" for c in model.constraints)
    assert model.integral_objective


@pytest.mark.parametrize("bad", [
    dict(H=2),
    dict(theta_star=0),
    dict(solver="gurobi"),
])
def test_scenario_validation(bad):
    kw = dict(H=8, theta_star=1, solver="bundled") | bad
    with pytest.raises(ScenarioError):
        Scenario(integrator(), parse("G[0,4] (x1 >= 1)", dim=1), **kw)


def test_system_validation():
    with pytest.raises(ScenarioError):
        LinearSystem([[1.0, 0.0]], [[1.0]], [0.0], [[-1, 1]], [[-1, 1]])
    with pytest.raises(ScenarioError):
        LinearSystem([[1.0]], [[1.0]], [5.0], [[-1, 1]], [[-1, 1]])
    sysm = integrator()
    assert sysm.simulate([[1.0], [1.0]])[:, 0].tolist() == [0.0, 1.0, 2.0]


def _scenario_dict(**extra):
    d = {"A": [[1]], "B": [[1]], "x0": [2], "state_bounds": [[-10, 10]], "input_bounds": [[-1, 1]],
         "H": 8, "formula": "G[0,4] (pos >= 1)", "signals": ["pos"], "objective": "eta_plus"}
    d.update(extra)
    return d


def test_scenario_json(tmp_path):
    (tmp_path / "formula.stl").write_text("G[0,4] (pos >= 1)\n", encoding="utf-8")
    d = _scenario_dict(budget={"max_nodes": 500})
    del d["formula"]
    d["formula_file"] = "formula.stl"
    path = tmp_path / "scn.json"
    path.write_text(json.dumps(d), encoding="utf-8")
    scn = load_scenario(path)
    assert scn.objective is Objective.ETA_PLUS
    assert scn.budget.max_nodes == 500
    assert scn.signals == ("pos",)


def test_scenario_errors(tmp_path):
    d = _scenario_dict()
    del d["H"]
    with pytest.raises(ScenarioError, match="'H'"):
        scenario_from_dict(d)
    path = tmp_path / "broken.json"
    path.write_text("{", encoding="utf-8")
    with pytest.raises(ScenarioError):
        load_scenario(path)


def test_write_result(tmp_path):
    scn = scenario_from_dict(_scenario_dict())
    res = synthesize(scn)
    write_result(res, tmp_path / "out")
    summary = json.loads((tmp_path / "out" / "summary.json").read_text())
    assert summary["status"] == "optimal" and summary["achieved"] == "4"
    traj = (tmp_path / "out" / "trajectory.csv").read_text().splitlines()
    assert traj[0] == "t,pos" and len(traj) == 10
    inputs = np.loadtxt(tmp_path / "out" / "inputs.csv", delimiter=",", skiprows=1)
    assert inputs.shape == (8, 2)
