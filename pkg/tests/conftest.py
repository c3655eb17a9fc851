import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

import _acceptance_log  # noqa: E402


def pytest_terminal_summary(terminalreporter):
    if _acceptance_log.LINES:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_log.LINES:
            terminalreporter.write_line(line)
