"""
Pytest configuration and shared fixtures.

This module provides common systems, partitions and configs for all tests
in the P-entropy laboratory test suite.
"""

import json
import logging
from fractions import Fraction

import numpy as np
import pytest
import yaml

from pentropy_lab.components import iet_engine
from pentropy_lab.models.partition import IntervalPartition
from pentropy_lab.models.systems import (
    IntervalExchange,
    MeasurableSet,
    RankOneRecipe,
    SymbolicShift,
)
from pentropy_lab.utils import error_handling
from pentropy_lab.utils import logging as lab_logging


# System fixtures
@pytest.fixture
def golden_rotation():
    """Rotation by the golden mean (sqrt(5) - 1) / 2 in extended precision."""
    return iet_engine.rotation("golden")


@pytest.fixture
def rational_rotation():
    """Rotation by 2/5, exact."""
    return iet_engine.rotation("2/5")


@pytest.fixture
def three_iet():
    """The exact 3-IET with lengths (1/2, 1/3, 1/6) and permutation (3, 2, 1)."""
    return IntervalExchange(
        (Fraction(1, 2), Fraction(1, 3), Fraction(1, 6)), (3, 2, 1)
    )


@pytest.fixture
def fair_coin():
    """Bernoulli(1/2, 1/2)."""
    return SymbolicShift((Fraction(1, 2), Fraction(1, 2)))


@pytest.fixture
def biased_coin():
    """Bernoulli(1/3, 2/3)."""
    return SymbolicShift((Fraction(1, 3), Fraction(2, 3)))


@pytest.fixture
def chacon_recipe():
    """Six stages of the 3-cut, middle-spacer recipe."""
    return RankOneRecipe.chacon(6)


# Partition and set fixtures
@pytest.fixture
def halves():
    """The dyadic 2-cell partition {[0, 1/2), [1/2, 1)}."""
    return IntervalPartition.dyadic(1)


@pytest.fixture
def left_half():
    return MeasurableSet.interval(Fraction(0), Fraction(1, 2))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# Config fixtures
@pytest.fixture
def write_config(tmp_path):
    """Write a config mapping to a YAML or JSON file and return its path."""

    def _write(data: dict, suffix: str = "yaml") -> str:
        path = tmp_path / f"experiment.{suffix}"
        with open(path, "w", encoding="utf-8") as f:
            if suffix == "json":
                json.dump(data, f)
            else:
                yaml.safe_dump(data, f)
        return str(path)

    return _write


@pytest.fixture(autouse=True)
def reset_error_tracker():
    """Give each test a fresh global error tracker."""
    error_handling._error_tracker = None
    yield
    error_handling._error_tracker = None


@pytest.fixture(autouse=True)
def reset_logging():
    """Drop handlers installed by setup_logging during a test."""
    yield
    lab_logging._logging_manager = None
    root = logging.getLogger(lab_logging.ROOT_LOGGER_NAME)
    for handler in list(root.handlers):
        handler.close()
    root.handlers.clear()
