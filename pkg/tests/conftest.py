import numpy as np
import pytest

from readoutkit import SimConfig, generate_dataset


@pytest.fixture(scope="session")
def quiet_config():
    """Fast, deterministic settings: short traces, no decay, mild noise."""
    return SimConfig(
        duration=200.0,
        sample_rate=2.0,
        t1=(None, None),
        noise_sigma=2.0,
        seed=11,
    )


@pytest.fixture(scope="session")
def quiet_dataset(quiet_config):
    return generate_dataset(quiet_config, shots_per_state=60)


@pytest.fixture(scope="session")
def decaying_config():
    return SimConfig(
        duration=200.0,
        sample_rate=2.0,
        t1=(400.0, 300.0),
        noise_sigma=2.0,
        seed=13,
    )


@pytest.fixture(scope="session")
def decaying_dataset(decaying_config):
    return generate_dataset(decaying_config, shots_per_state=60)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def acceptance_log():
    """Collects one verdict line per acceptance check, echoed after the run."""
    return _ACCEPTANCE_LINES.append


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance checks")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
