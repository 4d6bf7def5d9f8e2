"""Monte Carlo self-check of the closed-form twirl."""

import logging
from dataclasses import dataclass
from typing import Dict, Sequence, Tuple

import numpy as np

from gaugethermo.errors import InvalidParams, InvalidPattern
from gaugethermo.gauge import haar_unitaries, mc_twirl, twirl
from gaugethermo.operators import DensityMatrix, HermitianOperator
from gaugethermo.spectral import decompose, to_energy_basis

logger = logging.getLogger(__name__)

SIGMA_THRESHOLD = 5.0
ABSOLUTE_SLACK = 1e-12


@dataclass(frozen=True)
class TwirlCheckReport:
    frobenius_error: float
    stderr: float
    passed: bool
    multiplicities: Tuple[int, ...]

    def to_dict(self) -> Dict:
        return {
            "frobenius_error": self.frobenius_error,
            "stderr": self.stderr,
            "pass": self.passed,
            "pattern": list(self.multiplicities),
        }


def patterned_hamiltonian(pattern: Sequence[int], rng: np.random.Generator) -> HermitianOperator:
    """Random Hermitian matrix whose eigenvalue multiplicities follow ``pattern``."""
    levels = np.cumsum(1.0 + rng.random(len(pattern)))
    eigenvalues = np.repeat(levels, pattern)
    u = haar_unitaries(rng, 1, len(eigenvalues))[0]
    matrix = (u * eigenvalues[np.newaxis, :]) @ u.conj().T
    return HermitianOperator(0.5 * (matrix + matrix.conj().T))


def random_state(dim: int, rng: np.random.Generator) -> DensityMatrix:
    """Full-rank random state G G† / Tr."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = g @ g.conj().T
    return DensityMatrix(rho / np.trace(rho).real)


def twirl_check(dim: int, pattern: Sequence[int], n_samples: int, seed: int, diagonal: bool = False) -> TwirlCheckReport:
    """Compare the sampled gauge average against the closed-form twirl.

    Passes when the Frobenius error is within five standard errors (plus a
    1e-12 floor for the zero-variance case).
    """
    pattern = [int(n) for n in pattern]
    if not pattern or any(n < 1 for n in pattern):
        raise InvalidPattern(f"pattern entries must be positive integers, got {pattern}")
    if sum(pattern) != dim:
        raise InvalidPattern(f"pattern {pattern} sums to {sum(pattern)}, expected dim {dim}")
    if n_samples < 1:
        raise InvalidParams(f"n_samples must be positive, got {n_samples}")

    rng = np.random.default_rng(seed)
    h = patterned_hamiltonian(pattern, rng)
    s = decompose(h)
    if s.structure.multiplicities != pattern:
        raise InvalidPattern(f"constructed spectrum clustered as {s.structure.multiplicities}, expected {pattern}")

    rho = random_state(dim, rng)
    rho_e = to_energy_basis(rho, s)
    if diagonal:
        rho_e = DensityMatrix(np.diag(np.diag(rho_e.matrix)))

    exact = twirl(rho_e, s.structure)
    estimate, stderr = mc_twirl(rho_e, s.structure, n_samples, seed + 1)
    error = float(np.linalg.norm(estimate.matrix - exact.matrix))
    passed = bool(error <= SIGMA_THRESHOLD * stderr + ABSOLUTE_SLACK)
    if not passed:
        logger.warning("Twirl check failed: error %.3e vs stderr %.3e (pattern %s)", error, stderr, pattern)
    return TwirlCheckReport(frobenius_error=error, stderr=float(stderr), passed=passed, multiplicities=tuple(pattern))
