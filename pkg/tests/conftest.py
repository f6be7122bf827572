import math

import numpy as np
import pytest

from rydnet.physics import GateDrive, NoiseConfig, PhysicsContext, PowerLawModel, load_table


@pytest.fixture(scope="session")
def rb_table():
    return load_table()


@pytest.fixture(scope="session")
def ctx(rb_table):
    return PhysicsContext(rb_table)


@pytest.fixture(scope="session")
def range_only_ctx(rb_table):
    return PhysicsContext(rb_table, noise=NoiseConfig(tau_scat=math.inf))


@pytest.fixture(scope="session")
def noiseless_ctx(rb_table):
    return PhysicsContext(rb_table, noise=NoiseConfig(e_field=0.0, tau_scat=math.inf))


@pytest.fixture(scope="session")
def powerlaw(rb_table):
    return PowerLawModel.calibrated(rb_table, n_ref=70)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
