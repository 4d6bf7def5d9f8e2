"""Sudden-quench runner and the discretised evaluator for driven Hamiltonians."""

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.integrate

from gaugethermo.errors import (
    DegeneracyCrossing,
    DimensionMismatch,
    GridTooCoarse,
    InvalidGrid,
    InvalidParams,
    NonFiniteParameter,
)
from gaugethermo.models import LinearFamily, LZParams, ground_state, lz_family
from gaugethermo.operators import DensityMatrix, HermitianOperator, matrix_from_json
from gaugethermo.spectral import SpectralData, decompose, validate_hermitian
from gaugethermo.thermo import QU_CONVENTIONS, ThermoReport, quench_report

logger = logging.getLogger(__name__)

PERMUTATION_TOL = 0.5


@dataclass(frozen=True, eq=False)
class QuenchSpec:
    """Sudden quench H0 → H0 + δg·H1; g0 is carried as a label only."""

    h0: HermitianOperator
    h1: HermitianOperator
    g0: float
    delta_g: float
    deg_tol: Optional[float] = None
    qu_convention: str = "first-law"

    def __post_init__(self) -> None:
        if self.h0.dim != self.h1.dim:
            raise DimensionMismatch(f"H0 has dimension {self.h0.dim}, H1 has {self.h1.dim}")
        for name in ("g0", "delta_g"):
            if not math.isfinite(getattr(self, name)):
                raise NonFiniteParameter(f"{name} must be finite, got {getattr(self, name)}")
        if self.deg_tol is not None and not self.deg_tol > 0:
            raise InvalidParams(f"deg_tol must be positive, got {self.deg_tol}")
        if self.qu_convention not in QU_CONVENTIONS:
            raise InvalidParams(f"unknown Q_u convention {self.qu_convention!r}")


def run_quench(spec: QuenchSpec, rho0: Optional[DensityMatrix] = None) -> ThermoReport:
    """Quench report for ``rho0``, or for the ground state of H0 when omitted."""
    if rho0 is None:
        rho0 = ground_state(spec.h0, spec.deg_tol).state
    return quench_report(rho0, spec.h0, spec.h1, spec.delta_g, spec.deg_tol, spec.qu_convention)


def evolve_step(rho: DensityMatrix, h: HermitianOperator, dt: float) -> DensityMatrix:
    """e^{−iH dt} ρ e^{iH dt} through the spectral decomposition of H."""
    if not math.isfinite(dt):
        raise NonFiniteParameter(f"dt must be finite, got {dt}")
    if rho.dim != h.dim:
        raise DimensionMismatch(f"state has dimension {rho.dim}, Hamiltonian has {h.dim}")
    if dt == 0.0:
        return rho
    s = decompose(h)
    propagator = (s.basis * np.exp(-1j * s.eigenvalues * dt)[np.newaxis, :]) @ s.basis.conj().T
    evolved = propagator @ rho.matrix @ propagator.conj().T
    return DensityMatrix(0.5 * (evolved + evolved.conj().T))


@dataclass(frozen=True, eq=False)
class ProtocolGrid:
    """Time grid, the Hamiltonian at each node and the initial state."""

    times: np.ndarray
    hamiltonians: Tuple[HermitianOperator, ...]
    initial_state: DensityMatrix

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=float)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "hamiltonians", tuple(self.hamiltonians))
        if times.ndim != 1 or times.shape[0] < 2:
            raise InvalidGrid("a protocol needs at least 2 time points")
        if not np.all(np.isfinite(times)):
            raise NonFiniteParameter("protocol times must be finite")
        steps = np.diff(times)
        if np.any(steps <= 0):
            i = int(np.argmax(steps <= 0))
            raise InvalidGrid(f"times must be strictly increasing (t[{i}]={times[i]}, t[{i + 1}]={times[i + 1]})")
        if len(self.hamiltonians) != times.shape[0]:
            raise InvalidGrid(f"{times.shape[0]} times but {len(self.hamiltonians)} Hamiltonians")
        dim = self.initial_state.dim
        for i, h in enumerate(self.hamiltonians):
            if h.dim != dim:
                raise DimensionMismatch(f"Hamiltonian {i} has dimension {h.dim}, initial state has {dim}")

    @classmethod
    def from_json(cls, data: Dict) -> "ProtocolGrid":
        for key in ("times", "hamiltonians", "initial_state"):
            if key not in data:
                raise InvalidGrid(f"protocol JSON is missing '{key}'")
        hamiltonians = [
            validate_hermitian(matrix_from_json(entry, f"hamiltonians[{i}]"))
            for i, entry in enumerate(data["hamiltonians"])
        ]
        state = DensityMatrix.from_matrix(matrix_from_json(data["initial_state"], "initial_state"), "initial_state")
        return cls(times=np.asarray(data["times"], dtype=float), hamiltonians=tuple(hamiltonians), initial_state=state)


@dataclass(frozen=True, eq=False)
class ProtocolResult:
    w_inv: float
    q_c: float
    w_u: float
    q_u: float
    delta_u: float
    quadrature_error: float
    final_state: DensityMatrix

    def to_dict(self) -> Dict:
        return {
            "W_inv": self.w_inv,
            "Q_c": self.q_c,
            "W_u": self.w_u,
            "Q_u": self.q_u,
            "delta_U": self.delta_u,
            "quadrature_error": self.quadrature_error,
        }


def _aligned_spectra(grid: ProtocolGrid, deg_tol: Optional[float]) -> Tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (N, d) and eigenvectors (N, d, d) following continuous branches."""
    energies: List[np.ndarray] = []
    bases: List[np.ndarray] = []
    for t, h in zip(grid.times, grid.hamiltonians):
        s: SpectralData = decompose(h, deg_tol)
        if s.structure.is_degenerate:
            gaps = np.diff(s.eigenvalues)
            raise DegeneracyCrossing(
                f"spectrum is degenerate at t={t:.12g} (smallest gap {float(gaps.min()):.3e}, deg_tol {s.deg_tol:.3e})"
            )
        values, basis = s.eigenvalues, s.basis
        if bases:
            values, basis = _follow(bases[-1], values, basis, t)
        energies.append(values)
        bases.append(basis)
    return np.array(energies), np.array(bases)


def _follow(previous: np.ndarray, values: np.ndarray, basis: np.ndarray, t: float) -> Tuple[np.ndarray, np.ndarray]:
    """Reorder and rephase ``basis`` to maximise overlap with ``previous``."""
    overlaps = np.abs(previous.conj().T @ basis)
    dim = overlaps.shape[0]
    order = np.full(dim, -1)
    taken = np.zeros(dim, dtype=bool)
    # greedy: strongest overlaps are assigned first
    for flat in np.argsort(-overlaps, axis=None):
        row, col = divmod(int(flat), dim)
        if order[row] < 0 and not taken[col]:
            order[row] = col
            taken[col] = True

    permutation = np.zeros_like(overlaps)
    permutation[np.arange(dim), order] = 1.0
    deviation = float(np.max(np.abs(overlaps - permutation)))
    if deviation > PERMUTATION_TOL:
        raise GridTooCoarse(f"eigenvectors at t={t:.12g} deviate from the previous node by {deviation:.3f}")

    basis = basis[:, order]
    phases = np.einsum("ij,ij->j", previous.conj(), basis)
    basis = basis * (np.abs(phases) / phases)[np.newaxis, :]
    return values[order], basis


def _integrals(times: np.ndarray, hs: np.ndarray, energies: np.ndarray, bases: np.ndarray, rhos: np.ndarray) -> np.ndarray:
    """[W_inv, Q_c, W_u, Q_u] by trapezoid over the given nodes."""
    if times.shape[0] < 2:
        return np.zeros(4)
    h_dot = np.gradient(hs, times, axis=0, edge_order=1)
    e_dot = np.gradient(energies, times, axis=0, edge_order=1)
    u_dot = np.gradient(bases, times, axis=0, edge_order=1)
    rho_dot = np.gradient(rhos, times, axis=0, edge_order=1)

    def trace(a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return np.real(np.einsum("nij,nji->n", a, b))

    dagger = np.conj(np.transpose(bases, (0, 2, 1)))
    dagger_dot = np.conj(np.transpose(u_dot, (0, 2, 1)))
    scaled = bases * energies[:, np.newaxis, :]
    scaled_dot = u_dot * energies[:, np.newaxis, :]

    w_inv = trace(rhos, (bases * e_dot[:, np.newaxis, :]) @ dagger)
    q_c = trace(rhos, scaled_dot @ dagger + scaled @ dagger_dot)
    w_u = trace(rhos, h_dot)
    q_u = trace(rho_dot, hs)
    return np.array([scipy.integrate.trapezoid(y, times) for y in (w_inv, q_c, w_u, q_u)])


def run_protocol(grid: ProtocolGrid, deg_tol: Optional[float] = None) -> ProtocolResult:
    """Integrate invariant work and coherent heat along a driven protocol.

    Requires a non-degenerate spectrum at every node. States are propagated
    with the midpoint Hamiltonian of each interval.
    """
    times = grid.times
    energies, bases = _aligned_spectra(grid, deg_tol)
    hs = np.array([h.matrix for h in grid.hamiltonians])

    states = [grid.initial_state]
    for i in range(len(times) - 1):
        midpoint = HermitianOperator(0.5 * (hs[i] + hs[i + 1]))
        states.append(evolve_step(states[-1], midpoint, float(times[i + 1] - times[i])))
    rhos = np.array([rho.matrix for rho in states])

    full = _integrals(times, hs, energies, bases, rhos)
    sub = np.unique(np.append(np.arange(0, len(times), 2), len(times) - 1))
    if len(times) > 2:
        coarse = _integrals(times[sub], hs[sub], energies[sub], bases[sub], rhos[sub])
        quadrature_error = float(np.sum(np.abs(full - coarse)))
    else:
        quadrature_error = 0.0

    delta_u = float(np.real(np.trace(rhos[-1] @ hs[-1])) - np.real(np.trace(rhos[0] @ hs[0])))
    w_inv, q_c, w_u, q_u = (float(v) for v in full)
    logger.info(
        "Protocol over %d nodes: W_inv=%.6g Q_c=%.6g W_u=%.6g Q_u=%.6g (quadrature error %.2e)",
        len(times),
        w_inv,
        q_c,
        w_u,
        q_u,
        quadrature_error,
    )
    return ProtocolResult(
        w_inv=w_inv,
        q_c=q_c,
        w_u=w_u,
        q_u=q_u,
        delta_u=delta_u,
        quadrature_error=quadrature_error,
        final_state=states[-1],
    )


def lz_sweep_grid(p: LZParams, g_start: float, g_end: float, duration: float, steps: int) -> ProtocolGrid:
    """Linear sweep g(t) from g_start to g_end over ``steps`` intervals, starting in the ground state."""
    if steps < 1:
        raise InvalidGrid(f"steps must be at least 1, got {steps}")
    if not duration > 0:
        raise InvalidGrid(f"duration must be positive, got {duration}")
    family = lz_family(p)
    times = np.linspace(0.0, duration, steps + 1)
    couplings = np.linspace(g_start, g_end, steps + 1)
    hamiltonians = tuple(family.at(float(g)) for g in couplings)
    initial = ground_state(hamiltonians[0]).state
    return ProtocolGrid(times=times, hamiltonians=hamiltonians, initial_state=initial)


def family_protocol(
    family: LinearFamily, times: Sequence[float], couplings: Sequence[float], rho0: DensityMatrix
) -> ProtocolGrid:
    """Grid for H(t) = base + g(t)·direction sampled at ``times``."""
    if len(times) != len(couplings):
        raise InvalidGrid(f"{len(times)} times but {len(couplings)} couplings")
    hamiltonians = tuple(family.at(float(g)) for g in couplings)
    return ProtocolGrid(times=np.asarray(times, dtype=float), hamiltonians=hamiltonians, initial_state=rho0)
