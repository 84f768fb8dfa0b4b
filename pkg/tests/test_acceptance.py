"""Acceptance criteria, one test each; the verdict lines are repeated in the terminal summary."""

import pytest

from brinklab.validation import CRITERIA

LINES: dict[int, str] = {}


@pytest.mark.parametrize("criterion", CRITERIA, ids=[c.__name__ for c in CRITERIA])
def test_criterion(criterion):
    res = criterion()
    LINES[res.number] = res.line()
    print(res.line())
    assert res.passed, res.line()
