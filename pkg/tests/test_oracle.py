import itertools

import numpy as np
import pytest

from timerob import monitor as mon, oracle
from timerob.casestudies import running_example
from timerob.formula import Fragment, G, Pred, formula_horizon, in_fragment
from timerob.oracle import (
    brute_chi, brute_eta, brute_theta, check_oracle_agreement, lattice_optimum,
    random_apt, random_formula, random_instance, run_suite,
)
from timerob.parser import parse
from timerob.signal import shift_sync
from timerob.synthesis import LinearSystem, Scenario


def test_brute_force_running_example():
    apt, fs = running_example()
    assert [int(brute_eta(fs["phi"], apt, t)) for t in range(10)] == [1, 0, -5, -4, -3, -2, -1, 0, 1, 0]
    assert [int(brute_theta(fs["phi"], apt, t)) for t in range(10)] == [1, 0, -2, -3, -2, -1, 0, 0, 1, 0]


def test_eta_is_largest_preserving_shift():
    # eta+ at a satisfied point is the largest h with chi constant over
    # every early shift up to h, computed here straight from shift_sync
    for seed in range(30):
        f = random_formula(seed, depth=2)
        apt = random_apt(2, formula_horizon(f) + 8, seed)
        n = apt.horizon - formula_horizon(f) + 1
        for t in range(n):
            c = brute_chi(f, apt, t)
            h = 0
            while t + h + 1 < n and brute_chi(f, shift_sync(apt, h + 1), t) == c:
                h += 1
            if t + h + 1 >= n:
                continue  # the run reaches the window edge
            assert brute_eta(f, apt, t) == c * h


def test_generators_are_seeded():
    assert random_formula(5) == random_formula(5)
    assert random_apt(2, 9, 3) == random_apt(2, 9, 3)
    f, _ = random_instance(np.random.default_rng(1), Fragment.OR_EVENTUALLY)
    assert in_fragment(f, Fragment.OR_EVENTUALLY)


def test_suite_small_run_is_clean():
    reports = run_suite(seed=7, trials=60)
    assert set(reports) == set(oracle.THEOREMS)
    for r in reports.values():
        assert r.passed, r.to_json()
        assert r.checks > 0


def test_suite_rejects_unknown_theorem():
    with pytest.raises(ValueError):
        run_suite(trials=1, theorems=["nope"])


def test_agreement_check_catches_a_wrong_monitor(monkeypatch):
    apt, fs = running_example()
    real = mon.eta_series

    def off_by_one(f, a, side=mon.Side.PLUS):
        s = real(f, a, side)
        return mon.RobustnessSeries(s.kind, s.values + 1, s.start)

    monkeypatch.setattr(mon, "eta_series", off_by_one)
    rep = check_oracle_agreement(fs["phi"], apt)
    assert not rep.passed
    assert rep.failures[0]["formula"]


def _integrator(x0=0.0):
    return LinearSystem([[1.0]], [[1.0]], [x0], [[-10, 10]], [[-1, 1]])


def test_lattice_optimum_small_scenario():
    f = parse("G[0,4] (x1 >= 1)", dim=1)
    scn = Scenario(_integrator(2.0), f, 8, objective="eta_plus")
    res = lattice_optimum(scn, (-1.0, 0.0, 1.0))
    assert int(res.value) == 4
    traj = scn.system.simulate(res.inputs)
    assert np.all(traj[:5, 0] >= 1)


def test_lattice_optimum_exhaustive_agreement():
    # class merging must not change the answer of plain enumeration
    f = parse("F[0,3] G[0,1] (x1 >= 1.5)", dim=1)
    scn = Scenario(_integrator(), f, 5, objective="theta_plus")
    best = None
    for us in itertools.product((-1.0, 0.0, 1.0), repeat=5):
        from timerob.signal import Trace, evaluate_predicates

        apt = evaluate_predicates(Trace(scn.system.simulate(np.array(us)[:, None])), [p.pred for p in _preds(f)])
        v = brute_theta(f, apt, 0)
        if v >= 1 and (best is None or v > best):
            best = v
    got = lattice_optimum(scn, (-1.0, 0.0, 1.0)).value
    assert best is not None and got == best


def _preds(f):
    from timerob.formula import walk

    seen = {}
    for g in walk(f):
        if isinstance(g, Pred):
            seen.setdefault(g.pred.name, g)
    return list(seen.values())
