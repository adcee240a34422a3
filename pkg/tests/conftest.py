"""Pytest configuration and fixtures."""

import numpy as np
import pytest

from digraph_perf.core.config import Settings
from digraph_perf.core.graph import (
    cyclic_laplacian,
    directed_path_laplacian,
    imploding_star_laplacian,
)
from digraph_perf.schemas import FamilyHint, GainSet


@pytest.fixture
def test_settings() -> Settings:
    """Create test settings."""
    return Settings(THREADS=2, LOG_LEVEL="DEBUG")


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def unit_gains() -> GainSet:
    return GainSet(k_p=1.0, k_d=1.0, gamma_p=1.0, gamma_d=1.0)


@pytest.fixture
def star5() -> tuple[np.ndarray, FamilyHint]:
    return imploding_star_laplacian(5), FamilyHint(kind="star", n=5)


@pytest.fixture
def cycle3() -> tuple[np.ndarray, FamilyHint]:
    return cyclic_laplacian(3, 1.0, 1), FamilyHint(kind="cycle", n=3, d=1.0, omega=1)


@pytest.fixture
def path3() -> tuple[np.ndarray, FamilyHint]:
    return directed_path_laplacian(3), FamilyHint(kind="path", n=3)
