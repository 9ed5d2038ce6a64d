import numpy as np
import pytest

ACCEPTANCE_LINES = []


def record_criterion(name, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {name}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def example():
    from safestab.plant import planar_example

    return planar_example()
