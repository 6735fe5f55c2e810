"""Shared fixtures."""

import numpy as np
import pytest

from seesaw_optimizer import OptimizerConfig


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


@pytest.fixture
def quick_config():
    """Enough restarts for two-qutrit single-copy problems."""
    return OptimizerConfig(restarts=8, seed=11)


@pytest.fixture
def two_copy_config():
    return OptimizerConfig(restarts=8, seed=11)
