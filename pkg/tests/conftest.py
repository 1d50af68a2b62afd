# -*- coding: utf-8 -*-

"""Fixtures for the relfrac tests."""

import numpy as np
import pytest

from relfrac import GridSpec, ProblemSpec


def pytest_addoption(parser):
    parser.addoption(
        "--run-slow", action="store_true", default=False, help="run the slow tests"
    )


def pytest_collection_modifyitems(config, items):
    if config.getoption("--run-slow"):
        return
    skip = pytest.mark.skip(reason="needs --run-slow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture
def line():
    """The reference one-dimensional grid, L = 20 with 1024 points."""
    return GridSpec(1, 20.0, 1024)


@pytest.fixture
def coarse_line():
    return GridSpec(1, 10.0, 128)


@pytest.fixture
def plane():
    return GridSpec(2, 8.0, 64)


@pytest.fixture
def gaussian(line):
    """exp(-x²/2) on the reference grid."""
    return line.field(lambda x: np.exp(-0.5 * x * x))


@pytest.fixture
def benchmark():
    """The benchmark problem with its Gaussian well."""
    return ProblemSpec.benchmark()


@pytest.fixture
def plateau():
    """The benchmark problem with a flat well on |x| <= 1/2."""
    return ProblemSpec.plateau()
