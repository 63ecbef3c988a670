import pytest
from importlib import resources

from cordspec.isometry_group import load_presentation


@pytest.fixture(scope="session")
def fig8():
    path = resources.files("cordspec").joinpath("data/figure_eight.json")
    return load_presentation(path)


# one summary line per acceptance criterion, shown after the test run
ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
