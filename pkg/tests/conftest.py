import pytest

_LINES = []


@pytest.fixture
def report_line():
    """Record a one-line verdict; all lines are repeated in the terminal summary."""
    def add(line):
        _LINES.append(line)
        print(line)
    return add


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_LINES):
            terminalreporter.write_line(line)
