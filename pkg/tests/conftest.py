import pytest

_LINES: list[str] = []


@pytest.fixture
def record():
    """Log one acceptance verdict; printed in the terminal summary."""
    def _record(criterion: int, passed: bool, detail: str):
        _LINES.append(f"criterion {criterion}: {'PASS' if passed else 'FAIL'}  {detail}")
        print(_LINES[-1])
    return _record


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance")
        for line in _LINES:
            terminalreporter.write_line(line)
