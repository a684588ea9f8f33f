"""Acceptance criteria, one test per criterion.

Each test prints a single PASS/FAIL line (visible even without ``-s``) and
then asserts on the result.
"""

import pytest

from povminfo.verification import CHECKS, run_check


@pytest.mark.parametrize("number", [num for num, _, _ in CHECKS], ids=[name for _, name, _ in CHECKS])
def test_criterion(number, capsys):
    result = run_check(number)
    with capsys.disabled():
        print("\n" + result.line())
    assert result.passed, result.detail
