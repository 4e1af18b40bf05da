"""One test per acceptance criterion; each prints a PASS/FAIL line with its timing."""

import json

import pytest

from coulomb_dirac import acceptance

CRITERIA = [(num, title) for num, title, _ in acceptance.CRITERIA]


@pytest.mark.slow
@pytest.mark.parametrize("number,title", CRITERIA, ids=[f"c{n:02d}-{t.replace(' ', '_')}" for n, t in CRITERIA])
def test_criterion(number, title, capsys):
    res = acceptance.run_one(number)
    with capsys.disabled():
        print("\n" + res.line())
        if not res.passed:
            print(json.dumps(res.details, default=str)[:4000])
    assert res.passed, res.details
