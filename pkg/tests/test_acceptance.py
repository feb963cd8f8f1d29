"""Acceptance criteria 1-12, one test each, at their stated tolerances.

Each criterion prints a single pass/fail line (also repeated in the terminal
summary). Criterion 12 reuses the results of the randomized criteria that ran
earlier in this module instead of computing them a third time.
"""

import pytest

from pcp_forge.acceptance import CRITERIA, RANDOMIZED, criterion_12

from conftest import CRITERION_LINES

pytestmark = pytest.mark.acceptance

_done: dict = {}


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number):
    if number == 12:
        res = criterion_12(1, first={k: v for k, v in _done.items() if k in RANDOMIZED})
    else:
        res = CRITERIA[number](1)
    _done[number] = res
    line = res.line()
    CRITERION_LINES[number] = line
    print(line)
    assert res.passed, f"{line}\n{res.detail}"
