import pytest

from wienerbit import distgrid


@pytest.fixture(scope="session")
def unit_grid():
    return distgrid.make_grid(1.0, 1.0)


@pytest.fixture(scope="session")
def std_normal(unit_grid):
    return distgrid.gaussian_pdf(unit_grid, 0.0, 1.0)


_ACCEPTANCE = []


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for line in _ACCEPTANCE:
        terminalreporter.write_line(line)
