import pytest

_LINES: list = []


@pytest.fixture
def criterion():
    """``criterion(num, name, ok, detail)`` prints one PASS/FAIL line and asserts ``ok``."""

    def report(num, name, ok, detail):
        line = f"criterion {num:>2} {'PASS' if ok else 'FAIL'}  {name}: {detail}"
        print(line)
        _LINES.append((num, line))
        assert ok, line

    return report


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_LINES):
            terminalreporter.write_line(line)
