"""Acceptance gate: the twelve validation criteria, one test each.

Runs the same validation pass as `xpmsim validate` (shared caches, pinned
tolerances) and asserts each criterion individually, so the test report
carries one pass/fail line per criterion with the measured values. Known
quantitative shortfalls are left to fail rather than being masked here.
"""

import os

import pytest

from xpmsim.cli.validate import run_validate

CRITERIA = list(range(1, 13))


@pytest.fixture(scope="module")
def report(tmp_path_factory):
    oracle_dir = tmp_path_factory.mktemp("oracles")
    previous = os.environ.get("XPMSIM_ORACLE_DIR")
    os.environ["XPMSIM_ORACLE_DIR"] = str(oracle_dir)
    try:
        result = run_validate()
        print()
        print(result.text, end="")
        yield result
    finally:
        if previous is None:
            os.environ.pop("XPMSIM_ORACLE_DIR", None)
        else:
            os.environ["XPMSIM_ORACLE_DIR"] = previous


@pytest.mark.parametrize("number", CRITERIA, ids=[f"{n:02d}" for n in CRITERIA])
def test_criterion(report, number):
    result = next(r for r in report.results if r.number == number)
    print(result.line())
    assert result.passed, result.line()


def test_report_structure(report):
    assert [r.number for r in report.results] == CRITERIA
    n_pass = sum(r.passed for r in report.results)
    assert report.text.rstrip().endswith(f"{n_pass}/12 criteria passed")
    for r in report.results:
        assert r.line() in report.text
        assert r.runtime >= 0.0
