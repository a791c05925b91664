import pytest

from instance_gen import ACCEPTANCE_LINES, unit_square
from ridgechev.geometry import build_levels


@pytest.fixture
def square():
    ps, dirs = unit_square()
    return ps, dirs, build_levels(ps, dirs)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
