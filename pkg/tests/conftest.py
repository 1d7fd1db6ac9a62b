import numpy as np
import pytest

from prepost.hilbert import make_state

ABC = ("alpha", "beta", "gamma")

# Filled by test_acceptance.py; one line per criterion.
ACCEPTANCE_LINES = {}


def random_state(rng, labels=ABC):
    d = len(labels)
    return make_state(labels, rng.normal(size=d) + 1j * rng.normal(size=d))


def random_hermitian(rng, d):
    m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return 0.5 * (m + m.conj().T)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
