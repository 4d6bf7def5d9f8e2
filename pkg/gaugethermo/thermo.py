"""Work, heat and entropy functionals for sudden quenches."""

import logging
import math
from dataclasses import asdict, dataclass
from typing import Dict, Optional

import numpy as np

from gaugethermo.errors import (
    DimensionMismatch,
    InternalInconsistency,
    InvalidParams,
    InvalidState,
    NonFiniteParameter,
)
from gaugethermo.gauge import dephase, twirl
from gaugethermo.operators import DensityMatrix, HermitianOperator
from gaugethermo.spectral import (
    SpectralData,
    decompose,
    operator_in_energy_basis,
    to_energy_basis,
)

logger = logging.getLogger(__name__)

EIGENVALUE_FLOOR = 1e-14
NEGATIVE_TOL = 1e-10
ASYMMETRY_TOL = 1e-10
RESIDUAL_WARN = 1e-10

QU_CONVENTIONS = ("first-law", "zero")


def _entropy_from_populations(populations: np.ndarray) -> float:
    """Shannon entropy (natural log) of a probability vector."""
    values = np.real(np.asarray(populations))
    if values.size and float(values.min()) < -NEGATIVE_TOL:
        raise InvalidState(f"negative eigenvalue {float(values.min()):.3e} in entropy argument")
    values = np.clip(values, 0.0, 1.0)
    values = values[values >= EIGENVALUE_FLOOR]
    return float(-np.sum(values * np.log(values)))


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """S_u = −Tr{ρ ln ρ}."""
    return _entropy_from_populations(np.linalg.eigvalsh(rho.matrix))


def diagonal_entropy(rho: DensityMatrix, s: SpectralData) -> float:
    """S_d = S_u of the energy-basis dephased state."""
    rho_e = to_energy_basis(rho, s)
    return _entropy_from_populations(np.diag(dephase(rho_e).matrix))


def gauge_entropy(rho: DensityMatrix, s: SpectralData) -> float:
    """S_GT = S_u of the twirled state."""
    rho_e = to_energy_basis(rho, s)
    return _entropy_from_populations(np.diag(twirl(rho_e, s.structure).matrix))


def _asymmetry_from_blocks(diag: np.ndarray, s: SpectralData) -> float:
    """S_Γ summed cluster by cluster: Σ_i ρ_ii ln ρ_ii − n_k c_k ln c_k."""

    def xlogx(x: np.ndarray) -> np.ndarray:
        x = np.clip(x, 0.0, None)
        return np.where(x >= EIGENVALUE_FLOOR, x * np.log(np.where(x > 0, x, 1.0)), 0.0)

    total = 0.0
    for cluster in s.structure.clusters:
        if cluster.multiplicity == 1:
            continue
        block = diag[cluster.indices]
        mean = float(np.mean(block))
        total += float(np.sum(xlogx(block))) - cluster.multiplicity * float(xlogx(np.array([mean]))[0])
    return total


def holevo_asymmetry(rho: DensityMatrix, s: SpectralData) -> float:
    """S_Γ = S_GT − S_d, cross-checked against the cluster-by-cluster form."""
    rho_e = to_energy_basis(rho, s)
    diag = np.real(np.diag(rho_e.matrix))
    difference = _entropy_from_populations(np.diag(twirl(rho_e, s.structure).matrix)) - _entropy_from_populations(diag)
    blockwise = _asymmetry_from_blocks(diag, s)
    if abs(difference - blockwise) > ASYMMETRY_TOL:
        raise InternalInconsistency(
            f"S_Gamma disagrees between forms: {difference:.15g} vs {blockwise:.15g}"
        )
    return difference


def coherence_measure(rho: DensityMatrix, s: SpectralData) -> float:
    """C = S_d − S_u (relative entropy of coherence)."""
    return diagonal_entropy(rho, s) - von_neumann_entropy(rho)


def internal_energy(rho: DensityMatrix, h: HermitianOperator) -> float:
    return h.expectation(rho)


def tpm_average_work(rho0: DensityMatrix, pre: SpectralData, post: SpectralData) -> float:
    """Two-point-measurement mean work with spectral projectors of both Hamiltonians.

    The first measurement pinches ρ0 onto the clusters of ``pre``; the second
    reads populations of ``post`` clusters.
    """
    rho_pre = pre.basis.conj().T @ rho0.matrix @ pre.basis
    pinched = np.zeros_like(rho_pre)
    before = 0.0
    for cluster in pre.structure.clusters:
        block = rho_pre[cluster.indices, cluster.indices]
        pinched[cluster.indices, cluster.indices] = block
        before += cluster.eigenvalue * float(np.real(np.trace(block)))

    lab = pre.basis @ pinched @ pre.basis.conj().T
    populations = np.real(np.diag(post.basis.conj().T @ lab @ post.basis))
    after = sum(c.eigenvalue * float(np.sum(populations[c.indices])) for c in post.structure.clusters)
    return after - before


@dataclass(frozen=True)
class ThermoReport:
    """Every thermodynamic quantity of one sudden quench g0 → g0 + δg."""

    w_inv: float
    q_c: float
    q_inv: float
    w_u: float
    q_u: float
    w_tpm: float
    delta_u: float
    s_u: float
    s_d: float
    s_gt: float
    s_gamma: float
    coherence: float
    ground_energy: float
    ground_gap: float
    ground_degeneracy: int
    q_c_degeneracy: float
    q_c_coherence: float
    qu_convention: str = "first-law"

    def to_dict(self) -> Dict:
        return asdict(self)

    def identity_residuals(self) -> Dict[str, float]:
        """Absolute residuals of the identities every report must satisfy."""
        residuals = {
            "w_u": self.w_u - (self.w_inv + self.q_c),
            "q_inv": self.q_inv - (self.q_u + self.q_c),
            "s_gamma": self.s_gamma - (self.s_gt - self.s_d),
            "coherence": self.coherence - (self.s_d - self.s_u),
            "q_c_split": self.q_c - (self.q_c_degeneracy + self.q_c_coherence),
        }
        if self.qu_convention == "first-law":
            residuals["first_law"] = self.delta_u - (self.w_u + self.q_u)
        return residuals


def quench_report(
    rho0: DensityMatrix,
    h0: HermitianOperator,
    h1: HermitianOperator,
    delta_g: float,
    deg_tol: Optional[float] = None,
    qu_convention: str = "first-law",
) -> ThermoReport:
    """Evaluate a sudden quench H0 → H0 + δg·H1 on the state ``rho0``.

    Energy basis and Γ come from the post-quench Hamiltonian; the ground
    fields describe H0.
    """
    if not math.isfinite(delta_g):
        raise NonFiniteParameter(f"delta_g must be finite, got {delta_g}")
    if qu_convention not in QU_CONVENTIONS:
        raise InvalidParams(f"unknown Q_u convention {qu_convention!r}; expected one of {QU_CONVENTIONS}")
    if not (rho0.dim == h0.dim == h1.dim):
        raise DimensionMismatch(f"dimensions differ: rho0 {rho0.dim}, H0 {h0.dim}, H1 {h1.dim}")

    hg = h0.shifted(h1, delta_g)
    pre = decompose(h0, deg_tol)
    post = decompose(hg, deg_tol)

    rho_e = to_energy_basis(rho0, post).matrix
    h1_e = operator_in_energy_basis(h1, post)
    rho_dd = twirl(rho_e, post.structure)
    rho_diag = dephase(rho_e)
    half = 0.5 * delta_g

    def weighted(matrix: np.ndarray) -> float:
        return half * float(np.real(np.trace(matrix @ h1_e)))

    w_inv = weighted(rho_dd)
    q_c = weighted(rho_e - rho_dd)
    q_c_degeneracy = weighted(rho_diag - rho_dd)
    q_c_coherence = weighted(rho_e - rho_diag)
    w_u = w_inv + q_c
    delta_u = internal_energy(rho0, hg) - internal_energy(rho0, h0)
    q_u = delta_u - w_u if qu_convention == "first-law" else 0.0

    populations = np.real(np.diag(rho_e))
    s_u = von_neumann_entropy(rho0)
    s_d = _entropy_from_populations(populations)
    s_gt = _entropy_from_populations(np.real(np.diag(rho_dd)))
    s_gamma = s_gt - s_d
    blockwise = _asymmetry_from_blocks(populations, post)
    if abs(s_gamma - blockwise) > ASYMMETRY_TOL:
        raise InternalInconsistency(f"S_Gamma disagrees between forms: {s_gamma:.15g} vs {blockwise:.15g}")

    report = ThermoReport(
        w_inv=w_inv,
        q_c=q_c,
        q_inv=q_u + q_c,
        w_u=w_u,
        q_u=q_u,
        w_tpm=tpm_average_work(rho0, pre, post),
        delta_u=delta_u,
        s_u=s_u,
        s_d=s_d,
        s_gt=s_gt,
        s_gamma=s_gamma,
        coherence=s_d - s_u,
        ground_energy=pre.ground_energy,
        ground_gap=pre.ground_gap,
        ground_degeneracy=pre.ground_degeneracy,
        q_c_degeneracy=q_c_degeneracy,
        q_c_coherence=q_c_coherence,
        qu_convention=qu_convention,
    )

    scale = max(1.0, abs(delta_u), abs(w_u))
    for name, residual in report.identity_residuals().items():
        if abs(residual) > RESIDUAL_WARN * scale:
            logger.warning("Identity %s off by %.3e at delta_g=%g", name, residual, delta_g)
    return report
