import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from simulqkd import SystemParams


@pytest.fixture
def baseline_params():
    """Operating point of the displacement and key-rate figures."""
    return SystemParams(V_A=4.0, gamma=0.2, L=0.0, eta=0.5, nu_el=0.1, eps0=0.01, f=0.95, x_m=10.0, M=10)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
