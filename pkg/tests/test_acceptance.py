"""Acceptance criteria 1-10 at full size, one printed PASS/FAIL line each."""

import pytest

from mahlerkit.selfcheck import CRITERIA, Outcome


@pytest.mark.parametrize("num,name,fn", CRITERIA, ids=[f"criterion_{n}" for n, _, _ in CRITERIA])
def test_criterion(num, name, fn, capsys):
    try:
        passed, detail = fn()
    except Exception as exc:  # report the failure line before re-raising
        passed, detail = False, f"{type(exc).__name__}: {exc}"
    with capsys.disabled():
        print("\n" + Outcome(num, name, passed, detail).line())
    assert passed, detail
