"""Eigendecomposition, degeneracy clustering and energy-basis transforms."""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from gaugethermo.errors import (
    DimensionMismatch,
    EigensolverFailure,
    IndexOutOfRange,
    InvalidParams,
    InvalidPattern,
)
from gaugethermo.operators import (
    DensityMatrix,
    HermitianOperator,
    MatrixLike,
    as_matrix,
    as_square,
    check_hermitian,
    hermiticity_tolerance,
)

logger = logging.getLogger(__name__)

DEFAULT_DEG_RTOL = 1e-8
RECONSTRUCTION_RTOL = 1e-10
UNITARITY_TOL = 1e-12


@dataclass(frozen=True)
class Cluster:
    """A run of eigenvalues treated as one degenerate level."""

    eigenvalue: float
    start: int
    stop: int

    @property
    def multiplicity(self) -> int:
        return self.stop - self.start

    @property
    def indices(self) -> slice:
        return slice(self.start, self.stop)


@dataclass(frozen=True)
class DegeneracyStructure:
    """Ordered partition of the energy basis into degenerate clusters (Γ)."""

    clusters: Tuple[Cluster, ...]

    @property
    def p(self) -> int:
        return len(self.clusters)

    @property
    def dim(self) -> int:
        return self.clusters[-1].stop if self.clusters else 0

    @property
    def multiplicities(self) -> List[int]:
        return [c.multiplicity for c in self.clusters]

    @property
    def is_degenerate(self) -> bool:
        return any(c.multiplicity > 1 for c in self.clusters)

    @classmethod
    def from_multiplicities(
        cls, multiplicities: Sequence[int], eigenvalues: Optional[Sequence[float]] = None
    ) -> "DegeneracyStructure":
        """Build a structure from a block pattern such as ``[2, 1]``."""
        mults = [int(n) for n in multiplicities]
        if not mults or any(n < 1 for n in mults):
            raise InvalidPattern(f"multiplicities must be positive integers, got {list(multiplicities)}")
        if eigenvalues is None:
            eigenvalues = [float(k) for k in range(len(mults))]
        if len(eigenvalues) != len(mults):
            raise InvalidPattern("need one eigenvalue per cluster")

        clusters = []
        start = 0
        for n, value in zip(mults, eigenvalues):
            clusters.append(Cluster(eigenvalue=float(value), start=start, stop=start + n))
            start += n
        return cls(tuple(clusters))


@dataclass(frozen=True, eq=False)
class SpectralData:
    """Eigenvalues, phase-fixed eigenvectors (columns) and their clustering."""

    eigenvalues: np.ndarray
    basis: np.ndarray
    structure: DegeneracyStructure
    deg_tol: float

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    @property
    def ground_energy(self) -> float:
        return self.structure.clusters[0].eigenvalue

    @property
    def ground_degeneracy(self) -> int:
        return self.structure.clusters[0].multiplicity

    @property
    def ground_gap(self) -> float:
        """Gap between the ground cluster and the next one (0 for a single cluster)."""
        if self.structure.p < 2:
            return 0.0
        return self.structure.clusters[1].eigenvalue - self.structure.clusters[0].eigenvalue


def default_deg_tol(eigenvalues: np.ndarray) -> float:
    spread = float(eigenvalues[-1] - eigenvalues[0]) if len(eigenvalues) else 0.0
    return DEFAULT_DEG_RTOL * max(1.0, spread)


def cluster_eigenvalues(eigenvalues: np.ndarray, deg_tol: float) -> DegeneracyStructure:
    """Greedy scan over sorted eigenvalues; a gap above ``deg_tol`` opens a new cluster."""
    if not deg_tol > 0:
        raise InvalidParams(f"deg_tol must be positive, got {deg_tol}")

    values = np.asarray(eigenvalues, dtype=float)
    cuts = [0] + [i for i in range(1, len(values)) if values[i] - values[i - 1] > deg_tol] + [len(values)]

    clusters = []
    for start, stop in zip(cuts[:-1], cuts[1:]):
        members = values[start:stop]
        spread = float(members[-1] - members[0])
        if spread > deg_tol:
            logger.warning(
                "Cluster at index %d spans %.3e through chained gaps (deg_tol %.3e)",
                start,
                spread,
                deg_tol,
            )
        clusters.append(Cluster(eigenvalue=float(np.mean(members)), start=start, stop=stop))
    return DegeneracyStructure(tuple(clusters))


def fix_phases(vectors: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude component of each column real and positive."""
    vectors = np.array(vectors, dtype=complex)
    lead = np.argmax(np.abs(vectors), axis=0)
    pivots = vectors[lead, np.arange(vectors.shape[1])]
    return vectors * (np.abs(pivots) / pivots)[np.newaxis, :]


def validate_hermitian(matrix, tol: Optional[float] = None) -> HermitianOperator:
    """Check a raw matrix and return it as a symmetrised HermitianOperator."""
    arr = as_square(matrix, "Hamiltonian")
    if tol is None:
        tol = hermiticity_tolerance(arr)
    check_hermitian(arr, tol, "Hamiltonian")
    return HermitianOperator(0.5 * (arr + arr.conj().T))


def decompose(h: HermitianOperator, deg_tol: Optional[float] = None) -> SpectralData:
    """Diagonalise ``h``: ascending eigenvalues, phase-fixed basis and clusters."""
    matrix = h.matrix
    try:
        eigenvalues, basis = scipy.linalg.eigh(matrix)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError, ValueError) as exc:
        raise EigensolverFailure(f"eigendecomposition failed: {exc}") from exc
    if not np.all(np.isfinite(eigenvalues)):
        raise EigensolverFailure("eigensolver returned non-finite eigenvalues")

    basis = fix_phases(basis)
    dim = matrix.shape[0]

    rebuilt = (basis * eigenvalues[np.newaxis, :]) @ basis.conj().T
    residual = float(np.linalg.norm(rebuilt - matrix))
    scale = max(1.0, float(np.linalg.norm(matrix)))
    if residual > RECONSTRUCTION_RTOL * scale:
        raise EigensolverFailure(f"reconstruction residual {residual:.3e} exceeds {RECONSTRUCTION_RTOL * scale:.3e}")

    # eigh rounding grows with the dimension
    unitarity = float(np.linalg.norm(basis.conj().T @ basis - np.eye(dim)))
    if unitarity > UNITARITY_TOL * max(1, dim):
        raise EigensolverFailure(f"eigenvector matrix is not unitary (deviation {unitarity:.3e})")

    if deg_tol is None:
        deg_tol = default_deg_tol(eigenvalues)
    structure = cluster_eigenvalues(eigenvalues, deg_tol)
    return SpectralData(eigenvalues=eigenvalues, basis=basis, structure=structure, deg_tol=float(deg_tol))


def _check_dim(dim: int, s: SpectralData) -> None:
    if dim != s.dim:
        raise DimensionMismatch(f"operator has dimension {dim} but the spectrum has dimension {s.dim}")


def to_energy_basis(rho: DensityMatrix, s: SpectralData) -> DensityMatrix:
    """ρ^E = u† ρ u."""
    _check_dim(rho.dim, s)
    return DensityMatrix(s.basis.conj().T @ rho.matrix @ s.basis)


def operator_in_energy_basis(op: MatrixLike, s: SpectralData) -> np.ndarray:
    matrix = as_matrix(op)
    _check_dim(matrix.shape[0], s)
    return s.basis.conj().T @ matrix @ s.basis


def projector(s: SpectralData, k: int, lab: bool = False) -> np.ndarray:
    """Projector onto cluster ``k`` (0-based), in the energy basis or the lab basis."""
    if not 0 <= k < s.structure.p:
        raise IndexOutOfRange(f"cluster index {k} outside [0, {s.structure.p})")
    cluster = s.structure.clusters[k]
    if lab:
        columns = s.basis[:, cluster.indices]
        return columns @ columns.conj().T
    diag = np.zeros(s.dim, dtype=complex)
    diag[cluster.indices] = 1.0
    return np.diag(diag)
