"""Tests for gaugethermo.checks."""

import numpy as np
import pytest

from gaugethermo.checks import patterned_hamiltonian, twirl_check
from gaugethermo.errors import InvalidPattern
from gaugethermo.gauge import mc_twirl
from gaugethermo.operators import DensityMatrix
from gaugethermo.spectral import DegeneracyStructure, decompose


@pytest.mark.parametrize("seed", range(10))
def test_twirl_check_passes_for_mixed_pattern(seed):
    """dim 8, pattern [3, 2, 2, 1], 20000 samples passes for every seed."""
    report = twirl_check(8, [3, 2, 2, 1], 20000, seed)
    assert report.passed
    assert report.stderr > 0


def test_twirl_check_diagonal_qubit_has_no_error():
    """A diagonal state of a non-degenerate qubit is fixed by every gauge element."""
    report = twirl_check(2, [1, 1], 100, seed=4, diagonal=True)
    assert report.frobenius_error == pytest.approx(0.0, abs=1e-14)
    assert report.passed


def test_full_block_average_is_maximally_mixed(make_state):
    """Averaging over U(8) sends any state towards 1/8."""
    structure = DegeneracyStructure.from_multiplicities([8])
    estimate, stderr = mc_twirl(make_state(8), structure, 20000, seed=2)
    assert np.linalg.norm(estimate.matrix - np.eye(8) / 8) <= 5 * stderr


def test_twirl_check_rejects_pattern_dimension_mismatch():
    """The pattern must sum to dim."""
    with pytest.raises(InvalidPattern, match="sums to"):
        twirl_check(5, [3, 1], 10, seed=0)


def test_twirl_check_rejects_non_positive_entries():
    """Zero multiplicities are invalid."""
    with pytest.raises(InvalidPattern):
        twirl_check(3, [3, 0], 10, seed=0)


def test_twirl_check_report_dict():
    """The report serialises with a 'pass' key."""
    report = twirl_check(3, [2, 1], 200, seed=1)
    data = report.to_dict()
    assert set(data) == {"frobenius_error", "stderr", "pass", "pattern"}
    assert data["pattern"] == [2, 1]


def test_patterned_hamiltonian_has_requested_multiplicities(rng):
    """The generated spectrum clusters exactly as requested."""
    h = patterned_hamiltonian([2, 3, 1], rng)
    assert decompose(h).structure.multiplicities == [2, 3, 1]
    assert isinstance(DensityMatrix.maximally_mixed(h.dim), DensityMatrix)
