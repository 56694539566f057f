import pytest
from hypothesis import settings

from neyman_sharp.datasets import SMOKING, CABG, illustration_table
from neyman_sharp.outcomes import to_joint

settings.register_profile("default", max_examples=200, deadline=None)
settings.load_profile("default")

# filled by tests/test_acceptance.py, printed after the run
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def illustration():
    return illustration_table()


@pytest.fixture
def illustration_joint(illustration):
    return to_joint(illustration)


@pytest.fixture
def smoking():
    return SMOKING.summary()


@pytest.fixture
def cabg():
    return CABG.summary()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
