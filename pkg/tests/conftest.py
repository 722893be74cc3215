import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_criteria: dict[int, tuple[str, str]] = {}
_details: dict[int, list[str]] = {}


def pytest_runtest_makereport(item, call):
    mark = item.get_closest_marker("acceptance")
    if mark is None:
        return
    number, title = mark.args
    if call.when == "setup" and call.excinfo is not None:
        outcome = "SKIP" if call.excinfo.errisinstance(pytest.skip.Exception) else "FAIL"
    elif call.when == "call":
        outcome = "PASS" if call.excinfo is None else (
            "SKIP" if call.excinfo.errisinstance(pytest.skip.Exception) else "FAIL")
    else:
        return
    if call.when == "call":
        _details.setdefault(number, []).extend(
            v for k, v in item.user_properties if k == "detail")
    prev = _criteria.get(number, (None, title))[0]
    # a criterion with several parts fails if any part fails
    if prev == "FAIL" or (prev == "PASS" and outcome == "SKIP"):
        outcome = prev
    _criteria[number] = (outcome, title)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        outcome, title = _criteria[number]
        terminalreporter.write_line(f"criterion {number:>2}: {outcome:<4} {title}")
        for line in _details.get(number, []):
            terminalreporter.write_line(f"    {line}")
