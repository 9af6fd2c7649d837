import pytest

_LINES = {}


@pytest.fixture
def criterion():
    """Record the one-line outcome of an acceptance criterion for the summary."""

    def record(number, ok, detail):
        _LINES[number] = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(_LINES):
            terminalreporter.write_line(_LINES[number])
