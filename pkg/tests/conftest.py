import pytest

from circpack import benchmarks
from circpack.model import DeviceTopology

EXAMPLE_QASM = """OPENQASM 2.0;
include "qelib1.inc";
qreg q[2];
creg c[2];
h q[0];
x q[1];
h q[1];
cx q[0],q[1];
h q[0];
measure q[1] -> c[1];
measure q[0] -> c[0];
"""


@pytest.fixture(scope="session")
def small_pool():
    return benchmarks.load_small()


@pytest.fixture(scope="session")
def all_fixtures():
    return benchmarks.load()


@pytest.fixture
def two_by_ten():
    return DeviceTopology((10, 10))


@pytest.fixture
def four_by_five():
    return DeviceTopology((5, 5, 5, 5))


def pytest_terminal_summary(terminalreporter):
    from helpers import ACCEPTANCE

    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
