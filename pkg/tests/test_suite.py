#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""Tests for the acceptance suite."""

import math

import pytest

from relfrac import NumericalError, suite


def test_check_result_row():
    result = suite.CheckResult("a check", True, 1.0e-4, 1.0e-3, runtime=2.0)
    row = result.as_row()
    assert list(row) == [
        "criterion",
        "passed",
        "value",
        "threshold",
        "runtime",
        "time limit",
        "in time",
        "detail",
    ]
    assert row["in time"]


def test_check_result_late():
    """Running over the time limit is reported but does not fail the check."""
    result = suite.CheckResult("a check", True, 0.0, 1.0, runtime=2.0, time_limit=1.0)
    assert result.passed
    assert not result.in_time


@pytest.mark.parametrize(
    "values, slack, expected",
    [
        ([3.0, 2.0, 1.0], None, True),
        ([3.0, 3.0, 1.0], None, False),
        ([3.0, 3.0, 1.0], 1.0e-12, True),
        ([3.0, 3.0 + 1.0e-13, 1.0], 1.0e-12, True),
        ([1.0, 2.0], 1.0e-12, False),
    ],
)
def test_decreasing(values, slack, expected):
    assert suite._decreasing(values, slack) is expected


def test_checks_numbered():
    assert len(suite.CHECKS) == 10
    assert all(limit > 0 for _, _, limit in suite.CHECKS)


def test_special_functions_check():
    (result,) = suite.run_suite(select=[2])
    assert result.name == "special functions"
    assert result.passed
    assert result.value <= 1.0
    assert result.runtime > 0


def test_failing_check(monkeypatch):
    """A check that raises is recorded as failed with no value."""

    def broken(context):
        raise NumericalError("no convergence")

    def fine(context):
        assert context["seed"] == 7
        return True, 0.5, 1.0, "ok"

    checks = (("broken", broken, 1.0), ("fine", fine, 1.0))
    monkeypatch.setattr(suite, "CHECKS", checks)
    broken_result, fine_result = suite.run_suite(seed=7)
    assert not broken_result.passed
    assert math.isnan(broken_result.value)
    assert broken_result.detail == "no convergence"
    assert fine_result.passed
    assert fine_result.value == 0.5


def test_over_time_warning(monkeypatch, caplog):
    checks = (("quick", lambda context: (True, 0.0, 1.0, ""), 0.0),)
    monkeypatch.setattr(suite, "CHECKS", checks)
    (result,) = suite.run_suite()
    assert result.passed
    assert not result.in_time
    assert "over its limit" in caplog.text


def test_results_frame():
    results = [
        suite.CheckResult("one", True, 1.0, 2.0),
        suite.CheckResult("two", False, 3.0, 2.0, detail="too large"),
    ]
    frame = suite.results_frame(results)
    assert list(frame["criterion"]) == ["one", "two"]
    assert list(frame["passed"]) == [True, False]
    assert "in time" in frame.columns


@pytest.mark.slow
def test_fast_checks():
    results = suite.run_suite(select=[1, 3, 4, 5, 6, 10])
    failed = [r.name for r in results if not r.passed]
    assert failed == []


@pytest.mark.slow
def test_full_suite():
    results = suite.run_suite()
    assert len(results) == len(suite.CHECKS)
    failed = [(r.name, r.detail) for r in results if not r.passed]
    assert failed == []
