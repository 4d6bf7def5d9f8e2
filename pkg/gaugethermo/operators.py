"""Validated matrix types: Hermitian operators and density matrices."""

import logging
import math
from dataclasses import dataclass
from typing import Dict, Tuple, Union

import numpy as np

from gaugethermo.errors import (
    DimensionMismatch,
    InvalidState,
    NonFiniteParameter,
    NotHermitian,
    NotSquare,
)

logger = logging.getLogger(__name__)

HERMITIAN_RTOL = 1e-12
TRACE_TOL = 1e-12
POSITIVITY_TOL = 1e-10


def hermiticity_tolerance(matrix: np.ndarray) -> float:
    """Default tolerance 1e-12·max(1, max |entry|)."""
    scale = float(np.max(np.abs(matrix))) if matrix.size else 0.0
    return HERMITIAN_RTOL * max(1.0, scale)


def as_square(matrix, name: str = "matrix") -> np.ndarray:
    """Return ``matrix`` as a finite complex square array or raise."""
    arr = np.array(matrix, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise NotSquare(f"{name} must be a non-empty square matrix, got shape {arr.shape}")
    bad = np.argwhere(~np.isfinite(arr))
    if len(bad):
        i, j = bad[0]
        raise NonFiniteParameter(f"{name} entry ({i}, {j}) is not finite")
    return arr


def worst_hermitian_entry(matrix: np.ndarray) -> Tuple[int, int, float]:
    """Locate the entry with the largest |M_ij - conj(M_ji)|."""
    diff = np.abs(matrix - matrix.conj().T)
    i, j = np.unravel_index(int(np.argmax(diff)), diff.shape)
    return int(i), int(j), float(diff[i, j])


def check_hermitian(matrix: np.ndarray, tol: float, name: str = "matrix") -> None:
    i, j, err = worst_hermitian_entry(matrix)
    if err > tol:
        raise NotHermitian(
            f"{name} is not Hermitian: entry ({i}, {j}) differs from the conjugate "
            f"of ({j}, {i}) by {err:.3e} (tolerance {tol:.3e})"
        )


def _freeze(matrix: np.ndarray) -> np.ndarray:
    frozen = np.array(matrix, dtype=complex)
    frozen.setflags(write=False)
    return frozen


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """A square complex Hermitian matrix.

    The constructor trusts its input; use ``spectral.validate_hermitian`` for
    anything that came from outside the package.
    """

    matrix: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "matrix", _freeze(self.matrix))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def shifted(self, direction: "HermitianOperator", amount: float) -> "HermitianOperator":
        """Return ``self + amount * direction``."""
        if direction.dim != self.dim:
            raise DimensionMismatch(f"cannot add operators of dimension {self.dim} and {direction.dim}")
        return HermitianOperator(self.matrix + amount * direction.matrix)

    def expectation(self, rho: "DensityMatrix") -> float:
        """Tr{ρ A} (real part)."""
        return float(np.real(np.trace(rho.matrix @ self.matrix)))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A quantum state: Hermitian, unit trace, positive semidefinite."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "matrix", _freeze(self.matrix))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def from_matrix(cls, matrix, name: str = "state") -> "DensityMatrix":
        """Validate a raw matrix as a density matrix."""
        arr = as_square(matrix, name)
        try:
            check_hermitian(arr, HERMITIAN_RTOL * max(1.0, float(np.max(np.abs(arr)))), name)
        except NotHermitian as exc:
            raise InvalidState(str(exc)) from exc
        trace = np.trace(arr)
        if abs(trace - 1.0) > TRACE_TOL:
            raise InvalidState(f"{name} has trace {trace.real:.15g}{trace.imag:+.3g}j, expected 1")
        arr = 0.5 * (arr + arr.conj().T)
        lowest = float(np.linalg.eigvalsh(arr)[0])
        if lowest < -POSITIVITY_TOL:
            raise InvalidState(f"{name} has negative eigenvalue {lowest:.3e}")
        return cls(arr)

    @classmethod
    def pure(cls, vector) -> "DensityMatrix":
        """Projector onto the normalised ``vector``."""
        psi = np.asarray(vector, dtype=complex).ravel()
        norm = np.linalg.norm(psi)
        if psi.size == 0 or not math.isfinite(norm) or norm == 0.0:
            raise InvalidState("cannot build a pure state from a zero or non-finite vector")
        psi = psi / norm
        return cls(np.outer(psi, psi.conj()))

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityMatrix":
        if dim < 1:
            raise InvalidState(f"dimension must be positive, got {dim}")
        return cls(np.eye(dim, dtype=complex) / dim)


MatrixLike = Union[np.ndarray, HermitianOperator, DensityMatrix]


def as_matrix(value: MatrixLike) -> np.ndarray:
    """Unwrap a typed operator or pass a raw array through."""
    if isinstance(value, (HermitianOperator, DensityMatrix)):
        return value.matrix
    return np.asarray(value, dtype=complex)


def matrix_from_json(data: Dict, name: str = "matrix") -> np.ndarray:
    """Decode ``{"dim": d, "re": [[...]], "im": [[...]]}`` into a complex array."""
    if not isinstance(data, dict):
        raise NotSquare(f"{name} must be an object with dim/re/im, got {type(data).__name__}")
    missing = [key for key in ("dim", "re", "im") if key not in data]
    if missing:
        raise NotSquare(f"{name} is missing {', '.join(missing)}")

    dim = data["dim"]
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise NotSquare(f"{name}.dim must be a positive integer, got {dim!r}")

    parts = []
    for key in ("re", "im"):
        rows = data[key]
        if not isinstance(rows, list) or len(rows) != dim:
            raise NotSquare(f"{name}.{key} must have {dim} rows")
        for i, row in enumerate(rows):
            if not isinstance(row, list) or len(row) != dim:
                got = len(row) if isinstance(row, list) else type(row).__name__
                raise NotSquare(f"{name}.{key} row {i} has {got} entries, expected {dim}")
            for j, value in enumerate(row):
                if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
                    raise NonFiniteParameter(f"{name}.{key}[{i}][{j}] is not a finite number: {value!r}")
        parts.append(np.array(rows, dtype=float))

    return parts[0] + 1j * parts[1]


def matrix_to_json(matrix: MatrixLike) -> Dict:
    arr = as_matrix(matrix)
    return {
        "dim": int(arr.shape[0]),
        "re": np.real(arr).tolist(),
        "im": np.imag(arr).tolist(),
    }
