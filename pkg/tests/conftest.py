"""Shared fixtures."""

import json

import pytest

from coalsim.core.random import RandomStream
from coalsim.walks.kernel import WalkKernel


@pytest.fixture
def rng():
    return RandomStream(12345)


@pytest.fixture
def make_rng():
    """Factory for independent seeded streams."""
    def factory(seed: int = 0) -> RandomStream:
        return RandomStream(seed)
    return factory


@pytest.fixture
def simple_kernel():
    return WalkKernel.simple()


@pytest.fixture
def scenario_file(tmp_path):
    """Write a scenario dictionary to a JSON file and return its path."""
    def write(data, name: str = 'scenario.json'):
        path = tmp_path / name
        path.write_text(json.dumps(data), encoding='utf-8')
        return path
    return write
