import pytest

ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture
def report():
    """Record the one-line verdict of an acceptance criterion."""
    def record(number: int, checks: dict, note: str = ""):
        failed = [name for name, ok in checks.items() if not ok]
        verdict = "PASS" if not failed else "FAIL"
        line = f"criterion {number}: {verdict}"
        if failed:
            line += f" (failed: {', '.join(failed)})"
        if note:
            line += f" -- {note}"
        ACCEPTANCE_LINES[number] = line
        print(line)
        return not failed
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[number])
