"""Acceptance criteria: one PASS/FAIL line per criterion, shown even under output capture.

Run directly (``python3 tests/test_acceptance.py``) for just the summary lines.
"""

import sys

import pytest

from synspec.suite import ACCEPTANCE, CRITERIA, run_check


def line(res) -> str:
    out = f"{res.status} [{res.key}] {res.title} ({res.seconds:.2f} s)"
    return "\n".join([out] + [f"    {d}" for d in res.missing + res.details])


def test_criteria_are_complete():
    assert len(ACCEPTANCE) == 10 and set(ACCEPTANCE) == set(CRITERIA)


@pytest.mark.parametrize("key", ACCEPTANCE)
def test_criterion(key, capsys):
    res = run_check(key)
    with capsys.disabled():
        print("\n" + line(res))
    assert res.status == "PASS", line(res)


if __name__ == "__main__":
    results = [run_check(k) for k in ACCEPTANCE]
    for r in results:
        print(line(r))
    sys.exit(0 if all(r.ok for r in results) else 1)
