import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from timerob.formula import Predicate
from timerob.signal import (
    ApTrace, Direction, ShiftError, ShiftVector, Trace, cluster_shift, cluster_shift_vector,
    evaluate_predicates, read_apt_csv, read_trace_csv, shift_async, shift_sync,
    write_apt_csv, write_trace_csv,
)

apt = ApTrace.from_rows({"p": [1, 1, -1, -1, 1], "q": [-1, 1, 1, -1, -1]})


def test_sign_of_zero_is_positive():
    preds = [Predicate("p", (1.0,), 0.0)]
    out = evaluate_predicates(Trace([[-1.0], [0.0], [2.0]]), preds)
    assert out.values.tolist() == [[-1, 1, 1]]


def test_sync_early_and_late():
    early = shift_sync(apt, 2)
    assert early.row("p").tolist() == [-1, -1, 1]
    assert early.start == 0
    late = shift_sync(apt, 2, Direction.LATE)
    assert late.row("p").tolist() == [1, 1, -1]
    assert late.start == 2


def test_async_keeps_common_window():
    out = shift_async(apt, ShiftVector((0, 2)))
    assert out.row("p").tolist() == [1, 1, -1]
    assert out.row("q").tolist() == [1, -1, -1]
    late = shift_async(apt, ShiftVector((0, 2), "late"))
    assert late.row("p").tolist() == [-1, -1, 1]
    assert late.row("q").tolist() == [-1, 1, 1]


def test_shift_errors():
    with pytest.raises(ShiftError):
        shift_sync(apt, 5)
    with pytest.raises(ShiftError):
        ShiftVector((-1, 0))
    with pytest.raises(ShiftError):
        shift_async(apt, ShiftVector((1,)))


def test_aptrace_validation():
    with pytest.raises(ValueError):
        ApTrace.from_rows({"p": [1, 0, 1]})
    with pytest.raises(ValueError):
        ApTrace((Predicate("p", ()), Predicate("p", ())), [[1], [1]])


def test_cluster_shift_matches_predicate_shift():
    x = np.arange(12, dtype=float).reshape(6, 2) - 5.0
    tr = Trace(x)
    preds = [Predicate("a", (1.0, 0.0)), Predicate("b", (0.0, -1.0), 2.0)]
    moved = cluster_shift(tr, [[0], [1]], [0, 3])
    sv = cluster_shift_vector(preds, [[0], [1]], [0, 3])
    assert sv.shifts == (0, 3)
    assert evaluate_predicates(moved, preds) == shift_async(evaluate_predicates(tr, preds), sv)


def test_cluster_errors():
    tr = Trace(np.zeros((4, 3)))
    with pytest.raises(ShiftError):
        cluster_shift(tr, [[0, 1], [1, 2]], [0, 1])
    with pytest.raises(ShiftError):
        cluster_shift(tr, [[0], [1]], [0, 1])
    with pytest.raises(ShiftError):
        cluster_shift_vector([Predicate("m", (1.0, 1.0, 0.0))], [[0], [1, 2]], [0, 1])


@settings(max_examples=50, deadline=None)
@given(st.lists(st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=2, max_size=2),
                min_size=1, max_size=8))
def test_trace_csv_round_trip(tmp_path_factory, rows):
    path = tmp_path_factory.mktemp("csv") / "trace.csv"
    tr = Trace(np.array(rows), ("a", "b"))
    write_trace_csv(tr, path)
    back = read_trace_csv(path)
    assert back == tr and back.names == ("a", "b")


def test_apt_csv_round_trip(tmp_path):
    write_apt_csv(apt, tmp_path / "apt.csv")
    assert read_apt_csv(tmp_path / "apt.csv") == apt


def test_csv_errors(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("t,x1\n0,1\n2,3\n", encoding="utf-8")
    with pytest.raises(ValueError, match="contiguous"):
        read_trace_csv(bad)
    bad.write_text("time,x1\n0,1\n", encoding="utf-8")
    with pytest.raises(ValueError, match="header"):
        read_trace_csv(bad)
