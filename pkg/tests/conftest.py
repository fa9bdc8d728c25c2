import numpy as np
import pytest

from reebgss.contact import build_profile

ACCEPTANCE_LINES: list = []


@pytest.fixture(scope="session")
def chart():
    return build_profile(-2 * np.pi, np.sqrt(2.0))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
