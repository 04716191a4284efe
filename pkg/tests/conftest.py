import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from uncrel import make_observable, make_state
from uncrel.ensembles import pauli_matrices

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def paulis():
    return pauli_matrices()


@pytest.fixture
def up():
    return make_state([1, 0])


@pytest.fixture
def tilted():
    # (sqrt(3)/2, 1/2)
    return make_state([np.sqrt(3) / 2, 0.5])


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def herm(name, m):
    return make_observable(name, np.asarray(m, dtype=complex))


def pytest_terminal_summary(terminalreporter):
    import acceptance_log

    if acceptance_log.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(acceptance_log.RESULTS, key=lambda l: int(l.split()[1][2:])):
            terminalreporter.write_line(line)
