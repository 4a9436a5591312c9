import contextlib

import pytest

_RESULTS = []


@pytest.fixture
def criterion():
    """Record one acceptance criterion; prints a PASS/FAIL line in the summary."""

    @contextlib.contextmanager
    def record(label):
        try:
            yield
        except BaseException:
            _RESULTS.append(("FAIL", label))
            raise
        _RESULTS.append(("PASS", label))

    return record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for status, label in _RESULTS:
        terminalreporter.write_line(f"[{status}] {label}")
