"""Gauge group sampling, twirl, dephasing and coherence extraction."""

import logging
from dataclasses import dataclass
from typing import Iterator, Tuple, TypeVar

import numpy as np
import scipy.linalg

from gaugethermo.errors import DimensionMismatch, InvalidParams
from gaugethermo.operators import DensityMatrix, MatrixLike, as_matrix
from gaugethermo.spectral import DegeneracyStructure, SpectralData

logger = logging.getLogger(__name__)

BATCH_SIZE = 4096
INVARIANCE_TOL = 1e-10

T = TypeVar("T", np.ndarray, DensityMatrix)


@dataclass(frozen=True, eq=False)
class GaugeElement:
    """Block-diagonal unitary ⊕_k V_k with one Haar block per cluster."""

    blocks: Tuple[np.ndarray, ...]
    structure: DegeneracyStructure

    @property
    def matrix(self) -> np.ndarray:
        return scipy.linalg.block_diag(*self.blocks)

    def apply(self, rho_e: T) -> T:
        """V ρ V†."""
        v = self.matrix
        return _rewrap(rho_e, v @ as_matrix(rho_e) @ v.conj().T)


def _rewrap(original, matrix: np.ndarray):
    if isinstance(original, DensityMatrix):
        return DensityMatrix(matrix)
    return matrix


def _checked(rho_e: MatrixLike, structure: DegeneracyStructure) -> np.ndarray:
    matrix = as_matrix(rho_e)
    if matrix.ndim != 2 or matrix.shape != (structure.dim, structure.dim):
        raise DimensionMismatch(f"matrix of shape {matrix.shape} does not match Γ of dimension {structure.dim}")
    return matrix


def haar_unitaries(rng: np.random.Generator, count: int, size: int) -> np.ndarray:
    """Stack of ``count`` Haar-random ``size``×``size`` unitaries.

    QR of a complex Ginibre matrix, columns rescaled by the phases of diag(R).
    """
    z = (rng.standard_normal((count, size, size)) + 1j * rng.standard_normal((count, size, size))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (d / np.abs(d))[:, np.newaxis, :]


def _gauge_batches(structure: DegeneracyStructure, n: int, seed: int) -> Iterator[np.ndarray]:
    """Yield stacks of gauge matrices, at most BATCH_SIZE at a time."""
    rng = np.random.default_rng(seed)
    d = structure.dim
    remaining = n
    while remaining > 0:
        count = min(BATCH_SIZE, remaining)
        batch = np.zeros((count, d, d), dtype=complex)
        for cluster in structure.clusters:
            batch[:, cluster.indices, cluster.indices] = haar_unitaries(rng, count, cluster.multiplicity)
        yield batch
        remaining -= count


def sample_gauge_elements(structure: DegeneracyStructure, n: int, seed: int) -> np.ndarray:
    if n < 1:
        raise InvalidParams(f"number of samples must be positive, got {n}")
    return np.concatenate(list(_gauge_batches(structure, n, seed)), axis=0)


def sample_gauge_element(structure: DegeneracyStructure, seed: int) -> GaugeElement:
    """Draw one element of G_Γ = U(n_1) × … × U(n_p)."""
    v = sample_gauge_elements(structure, 1, seed)[0]
    blocks = tuple(v[c.indices, c.indices].copy() for c in structure.clusters)
    return GaugeElement(blocks=blocks, structure=structure)


def twirl(rho_e: T, structure: DegeneracyStructure) -> T:
    """Group average over G_Γ in closed form: each block becomes its mean diagonal times identity."""
    matrix = _checked(rho_e, structure)
    diag = np.diag(matrix).copy()
    for cluster in structure.clusters:
        if cluster.multiplicity > 1:
            diag[cluster.indices] = np.mean(diag[cluster.indices])
    if isinstance(rho_e, DensityMatrix):
        diag = np.real(diag)
    return _rewrap(rho_e, np.diag(diag).astype(complex))


def dephase(rho_e: T) -> T:
    """Keep only the energy-basis diagonal."""
    matrix = as_matrix(rho_e)
    return _rewrap(rho_e, np.diag(np.diag(matrix)))


def coherence_part(rho_e: MatrixLike) -> np.ndarray:
    """ρ_c^E = ρ^E − dephase(ρ^E); a traceless operator, not a state."""
    matrix = as_matrix(rho_e)
    return matrix - np.diag(np.diag(matrix))


def mc_twirl(rho_e: T, structure: DegeneracyStructure, n_samples: int, seed: int) -> Tuple[T, float]:
    """Monte Carlo estimate of the twirl and its Frobenius-norm standard error."""
    matrix = _checked(rho_e, structure)
    if n_samples < 1:
        raise InvalidParams(f"n_samples must be positive, got {n_samples}")

    total = np.zeros_like(matrix)
    total_sq = np.zeros(matrix.shape, dtype=float)
    for batch in _gauge_batches(structure, n_samples, seed):
        samples = batch @ matrix[np.newaxis, :, :] @ np.conj(np.transpose(batch, (0, 2, 1)))
        total += samples.sum(axis=0)
        total_sq += (np.abs(samples) ** 2).sum(axis=0)

    mean = total / n_samples
    if n_samples > 1:
        variance = np.clip(total_sq - n_samples * np.abs(mean) ** 2, 0.0, None) / (n_samples - 1)
        stderr = float(np.sqrt(variance.sum() / n_samples))
    else:
        stderr = 0.0
    logger.debug("mc_twirl: %d samples, stderr %.3e", n_samples, stderr)
    return _rewrap(rho_e, mean), stderr


def is_invariant(rho_e: MatrixLike, structure: DegeneracyStructure, tol: float = INVARIANCE_TOL) -> bool:
    """True when ρ^E equals its twirl within ``tol`` (Frobenius)."""
    matrix = _checked(rho_e, structure)
    return float(np.linalg.norm(matrix - twirl(matrix, structure))) <= tol


def invariant_state(rho: DensityMatrix, s: SpectralData) -> DensityMatrix:
    """Lab-basis twirl D(ρ) = u ρ_dd^E u†."""
    if rho.dim != s.dim:
        raise DimensionMismatch(f"state has dimension {rho.dim} but the spectrum has dimension {s.dim}")
    rho_e = s.basis.conj().T @ rho.matrix @ s.basis
    rho_dd = twirl(rho_e, s.structure)
    return DensityMatrix(s.basis @ rho_dd @ s.basis.conj().T)
