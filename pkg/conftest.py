# conftest.py
"""
Shared fixtures: seeded randomness and the small algebraic objects most tests use
"""

import random

import pytest

from backend.api.semimodule import FiniteSemimodule, regular_module
from backend.api.semiring_core import BOOLEAN, QMAX, boolean_table, chain_table, zmod_table


@pytest.fixture
def rng():
    return random.Random(20240607)


@pytest.fixture
def qmax():
    return QMAX


@pytest.fixture
def boolean():
    return BOOLEAN


@pytest.fixture
def chain3():
    return chain_table(3)


@pytest.fixture
def z4():
    return zmod_table(4)


@pytest.fixture
def bool_module():
    """The regular B-module {0, 1}"""
    return regular_module(boolean_table())


@pytest.fixture
def diamond_module():
    """B x B as a B-module: elements 0, a, b, top with join as addition"""
    B = boolean_table()
    add = [
        [0, 1, 2, 3],
        [1, 1, 3, 3],
        [2, 3, 2, 3],
        [3, 3, 3, 3],
    ]
    scalar = [
        [0, 0, 0, 0],
        [0, 1, 2, 3],
    ]
    return FiniteSemimodule(B, add, scalar, 0, name="BxB")
