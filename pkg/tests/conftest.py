import pytest

from fractalkit.specs import gasket, interval

# criterion summary lines collected by the acceptance tests, echoed at the
# end of the run so they are visible without -s
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def line():
    return interval()


@pytest.fixture(scope="session")
def sg():
    return gasket()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("-", "acceptance criteria")
        for text in ACCEPTANCE_LINES:
            terminalreporter.write_line(text)
