import math

import numpy as np
import pytest

from timerob import monitor as mon
from timerob.casestudies import CHI_P, CHI_Q, RUNNING_EXPECTED, running_example
from timerob.formula import F, G, Pred, Predicate, U
from timerob.parser import parse
from timerob.signal import ApTrace, Trace


def test_running_example_series():
    apt, fs = running_example()
    assert mon.chi_series(fs["phi"], apt).values.tolist() == RUNNING_EXPECTED["chi_phi"]
    assert mon.eta_series(fs["phi"], apt).as_ints() == RUNNING_EXPECTED["eta_plus"]
    assert mon.theta_series(fs["p"], apt).as_ints() == RUNNING_EXPECTED["theta_plus_p"]
    assert mon.theta_series(fs["q"], apt).as_ints() == RUNNING_EXPECTED["theta_plus_q"]
    assert mon.theta_series(fs["phi"], apt).as_ints() == RUNNING_EXPECTED["theta_plus"]


def test_minus_side_counts_backwards():
    apt = ApTrace.from_rows({"p": [-1, 1, 1, 1, -1]})
    p = Pred(apt.predicates[0])
    assert mon.eta_series(p, apt, "minus").as_ints() == [0, 0, 1, 2, 0]


def test_true_has_infinite_robustness():
    apt, _ = running_example()
    from timerob.formula import TrueF

    vals = mon.theta_series(TrueF(), apt).values
    assert np.all(vals == math.inf)


def test_window_shrinks_with_horizon():
    apt, fs = running_example()
    f = G(0, 3, fs["p"])
    assert len(mon.chi_series(f, apt)) == apt.horizon - 3 + 1
    with pytest.raises(mon.EvaluationError):
        mon.chi_series(G(0, 20, fs["p"]), apt)


def test_zero_counts_as_satisfied():
    f = parse("x1 >= 0", dim=1)
    res = mon.monitor_signal(f, Trace([[0.0], [0.0], [-1.0]]))
    assert res.chi.values.tolist() == [1, 1, -1]
    assert res.eta_plus.as_ints() == [1, 0, 0]


def test_until_and_eventually_values():
    apt = ApTrace.from_rows({"a": [1, 1, 1, -1, -1, -1], "b": [-1, -1, 1, 1, -1, -1]})
    a, b = (Pred(p) for p in apt.predicates)
    assert mon.chi_series(U(0, 2, a, b), apt).values.tolist() == [1, 1, 1, 1]
    assert mon.chi_series(F(1, 2, b), apt).values.tolist() == [1, 1, 1, -1]


def test_sine_study():
    from timerob.casestudies import SINE_EXPECTED, sine_formulas, sine_trace

    tr = sine_trace()
    for key, f in sine_formulas().items():
        res = mon.monitor_signal(f, tr)
        assert (int(res.eta_plus.at(0)), int(res.theta_plus.at(0))) == SINE_EXPECTED[key]


def test_csv_and_summary():
    apt, fs = running_example()
    res = mon.monitor(fs["phi"], apt)
    text = res.to_csv().splitlines()
    assert text[0] == "t,chi,eta_plus,eta_minus,theta_plus,theta_minus"
    assert len(text) == 11
    assert res.summary()["eta_plus"] == "1"
    assert CHI_P[0] == CHI_Q[0] == 1


def test_violation_runs_count_negative():
    apt = ApTrace.from_rows({"p": [-1, -1, -1, 1]})
    p = Pred(apt.predicates[0])
    assert mon.eta_series(p, apt).as_ints() == [-2, -1, 0, 0]
