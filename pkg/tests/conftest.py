from pathlib import Path
from typing import Callable, Sequence

import numpy as np
import pytest

from gaugethermo.checks import patterned_hamiltonian, random_state
from gaugethermo.models import LZParams
from gaugethermo.operators import DensityMatrix, HermitianOperator


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator so every run draws the same matrices."""
    return np.random.default_rng(20240611)


@pytest.fixture
def make_state(rng: np.random.Generator) -> Callable[[int], DensityMatrix]:
    """Factory for full-rank random density matrices."""
    return lambda dim: random_state(dim, rng)


@pytest.fixture
def make_hamiltonian(rng: np.random.Generator) -> Callable[[Sequence[int]], HermitianOperator]:
    """Factory for random Hermitian matrices with a forced multiplicity pattern."""
    return lambda pattern: patterned_hamiltonian(pattern, rng)


@pytest.fixture
def lz_params() -> LZParams:
    """Landau-Zener parameters used throughout the scans (a=2, Δ=1, ε=0.001)."""
    return LZParams(a=2.0, delta=1.0, eps=0.001)


@pytest.fixture
def tmp_csv(tmp_path: Path) -> Path:
    """Return a path to a temporary CSV file (does not create the file)."""
    return tmp_path / "data" / "scan.csv"
