"""Shared fixtures and the acceptance-criteria summary hook."""

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # make oracles importable

_ACCEPTANCE: dict = {}


@pytest.fixture
def acceptance_log():
    """Record one pass/fail line per acceptance criterion.

    Tests call log(number, label, passed, detail) BEFORE asserting, so the
    summary line appears even when the assertion then fails.
    """

    def log(number: int, label: str, passed: bool, detail: str = "") -> None:
        _ACCEPTANCE[int(number)] = (label, bool(passed), detail)

    return log


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        label, passed, detail = _ACCEPTANCE[number]
        word = "PASS" if passed else "FAIL"
        line = f"criterion {number:2d}: {word}  {label}"
        if detail:
            line += f"  ({detail})"
        terminalreporter.write_line(line)
