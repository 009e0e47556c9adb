import pytest
from hypothesis import settings

from jch import SiteParams

settings.register_profile("jch", max_examples=40, deadline=None)
settings.load_profile("jch")


@pytest.fixture
def tuned():
    return SiteParams.from_detuning(0.0)


@pytest.fixture
def detuned():
    return SiteParams.from_detuning(1.0)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import LINES

    if LINES:
        terminalreporter.section("acceptance checks")
        for line in LINES:
            terminalreporter.write_line(line)
