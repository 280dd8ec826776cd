import pytest

from timerob import casestudies


@pytest.mark.parametrize("name", casestudies.NAMES)
def test_reports_match(name):
    rep = casestudies.report(name)
    assert rep.passed, rep.mismatches
    assert "all values match" in rep.text()


def test_unknown_name():
    with pytest.raises(casestudies.UnknownCaseStudy):
        casestudies.report("surveillance")


def test_mismatch_is_reported(monkeypatch):
    monkeypatch.setitem(casestudies.SINE_EXPECTED, "phi1", (8, 7))
    rep = casestudies.report("sine")
    assert not rep.passed
    assert rep.mismatches == [{"row": "phi1", "got": [7, 7], "expected": [8, 7]}]
    assert "expected 8 7" in rep.text()


def test_sine_trace_shape():
    tr = casestudies.sine_trace()
    assert tr.samples.shape == (101, 2)
    assert tr.names == ("x1", "x2")
