import sys

import numpy as np
import pytest
from hypothesis import settings

from gramcert.blockmat import BlockMatrix
from gramcert.testkit import InstanceSpec, generate

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

PM1 = np.array([[1, 1, -1], [1, 1, 1], [-1, 1, 1]], dtype=complex)


@pytest.fixture
def example41():
    T, truth = generate(InstanceSpec(0, "rank-one-coupled", 3, (2, 2, 2), 1, {"preset": "example41"}))
    return T


@pytest.fixture
def pm1():
    return BlockMatrix.from_dense(PM1, (1, 1, 1))


def random_complex(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
