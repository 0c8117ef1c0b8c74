import numpy as np
import pytest

from postsel.scenarios import hardy, three_box


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def box():
    return three_box("intro")


@pytest.fixture
def box_exp():
    return three_box("experimental")


@pytest.fixture
def hardy_spec():
    return hardy()


_acceptance_key = pytest.StashKey[list]()


@pytest.fixture
def acceptance_log(request):
    """Collects one status line per acceptance criterion for the terminal summary."""
    return request.config.stash.setdefault(_acceptance_key, [])


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_acceptance_key, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
