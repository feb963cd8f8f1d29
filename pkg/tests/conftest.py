"""Collects acceptance-criterion lines and prints them after the test summary."""

CRITERION_LINES: dict = {}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not CRITERION_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERION_LINES):
        terminalreporter.write_line(CRITERION_LINES[n])
