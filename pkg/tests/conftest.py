import numpy as np
import pytest

from brinklab.grid import Grid


@pytest.fixture
def grid1d():
    return Grid(1, 20.0, 512)


def gaussian_values(grid, sigma=1.0, center=0.0):
    x = grid.centers
    return np.exp(-0.5 * ((x - center) / sigma) ** 2) / (np.sqrt(2 * np.pi) * sigma)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(mod.LINES):
        terminalreporter.write_line(mod.LINES[k])
