"""Collects acceptance verdicts and prints one line per criterion at the end."""
import pytest

_RESULTS = {}


@pytest.fixture(scope="session")
def verdict():
    def record(number, passed, detail):
        _RESULTS[number] = (bool(passed), detail)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        passed, detail = _RESULTS[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}")
