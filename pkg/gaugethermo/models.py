"""Landau-Zener and Lipkin-Meshkov-Glick Hamiltonians, ground states and closed forms."""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from gaugethermo.errors import InvalidJ, InvalidParams, NonFiniteParameter, SingularPoint
from gaugethermo.operators import DensityMatrix, HermitianOperator
from gaugethermo.spectral import decompose

logger = logging.getLogger(__name__)

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)

HINT_PROJECTION_FLOOR = 1e-8


def _require_finite(**values: float) -> None:
    for name, value in values.items():
        if not math.isfinite(value):
            raise NonFiniteParameter(f"{name} must be finite, got {value}")


@dataclass(frozen=True)
class LZParams:
    """Two-level Landau-Zener family H = (−Δ/2 + a·g)σ_z + ε·σ_x."""

    a: float
    delta: float
    eps: float
    g: float = 0.0

    def __post_init__(self) -> None:
        _require_finite(a=self.a, delta=self.delta, eps=self.eps, g=self.g)
        if self.a <= 0:
            raise InvalidParams(f"LZ coupling a must be positive, got {self.a}")
        if self.eps < 0:
            raise InvalidParams(f"LZ gap parameter eps must be non-negative, got {self.eps}")

    @property
    def gamma0(self) -> float:
        """γ(g) = a·g − Δ/2, the σ_z coefficient."""
        return self.a * self.g - self.delta / 2.0

    def at(self, g: float) -> "LZParams":
        return LZParams(a=self.a, delta=self.delta, eps=self.eps, g=g)


@dataclass(frozen=True)
class LMGParams:
    """Lipkin-Meshkov-Glick family H = −(k/2j)(J_z² + γJ_y²) − g·J_x."""

    k: float
    gamma: float
    j: float
    g: float = 0.0

    def __post_init__(self) -> None:
        _require_finite(k=self.k, gamma=self.gamma, j=self.j, g=self.g)
        if self.j <= 0 or abs(2 * self.j - round(2 * self.j)) > 1e-9:
            raise InvalidJ(f"j must be a positive half-integer, got {self.j}")
        if self.k <= 0:
            raise InvalidParams(f"k must be positive, got {self.k}")
        if not 0.0 <= self.gamma <= 1.0:
            raise InvalidParams(f"gamma must lie in [0, 1], got {self.gamma}")
        if self.g < 0:
            raise InvalidParams(f"g must be non-negative, got {self.g}")

    @property
    def dim(self) -> int:
        return int(round(2 * self.j)) + 1

    def at(self, g: float) -> "LMGParams":
        return LMGParams(k=self.k, gamma=self.gamma, j=self.j, g=g)


@dataclass(frozen=True, eq=False)
class LinearFamily:
    """One-parameter family H(g) = base + g·direction."""

    base: HermitianOperator
    direction: HermitianOperator
    name: str = "custom"

    def at(self, g: float) -> HermitianOperator:
        _require_finite(g=g)
        return self.base.shifted(self.direction, g)


def lz_family(p: LZParams) -> LinearFamily:
    base = HermitianOperator(-p.delta / 2.0 * SIGMA_Z + p.eps * SIGMA_X)
    return LinearFamily(base=base, direction=HermitianOperator(p.a * SIGMA_Z), name="lz")


def lz_hamiltonian(p: LZParams) -> HermitianOperator:
    return HermitianOperator(p.gamma0 * SIGMA_Z + p.eps * SIGMA_X)


def collective_spin_ops(j: float) -> Tuple[HermitianOperator, HermitianOperator, HermitianOperator]:
    """(J_x, J_y, J_z) in the J_z eigenbasis, m ordered from +j down to −j."""
    if j <= 0 or abs(2 * j - round(2 * j)) > 1e-9:
        raise InvalidJ(f"j must be a positive half-integer, got {j}")
    j = round(2 * j) / 2.0
    m = j - np.arange(int(round(2 * j)) + 1)
    # <m+1|J+|m> sits on the superdiagonal
    ladder = np.sqrt(j * (j + 1) - m[1:] * (m[1:] + 1))
    j_plus = np.diag(ladder, k=1).astype(complex)
    j_minus = j_plus.conj().T
    jx = 0.5 * (j_plus + j_minus)
    jy = -0.5j * (j_plus - j_minus)
    jz = np.diag(m).astype(complex)
    return HermitianOperator(jx), HermitianOperator(jy), HermitianOperator(jz)


def lmg_family(p: LMGParams) -> LinearFamily:
    jx, jy, jz = collective_spin_ops(p.j)
    base = -(p.k / (2.0 * p.j)) * (jz.matrix @ jz.matrix + p.gamma * (jy.matrix @ jy.matrix))
    base = 0.5 * (base + base.conj().T)
    return LinearFamily(base=HermitianOperator(base), direction=HermitianOperator(-jx.matrix), name="lmg")


def lmg_hamiltonian(p: LMGParams) -> HermitianOperator:
    return lmg_family(p).at(p.g)


@dataclass(frozen=True, eq=False)
class GroundState:
    """Prepared ground state with the level data it was selected from."""

    state: DensityMatrix
    vector: np.ndarray
    energy: float
    degeneracy: int
    gap: float


def ground_state(
    h: HermitianOperator, deg_tol: Optional[float] = None, hint: Optional[np.ndarray] = None
) -> GroundState:
    """Pure ground state of ``h``.

    In a degenerate ground cluster the hint (usually the previous scan point's
    vector) is projected onto the cluster; without a hint the lowest-index
    eigenvector is used.
    """
    s = decompose(h, deg_tol)
    ground = s.structure.clusters[0]
    columns = s.basis[:, ground.indices]

    vector = columns[:, 0]
    if ground.multiplicity > 1 and hint is not None:
        hint = np.asarray(hint, dtype=complex).ravel()
        if hint.shape[0] != s.dim:
            raise InvalidParams(f"hint has length {hint.shape[0]}, expected {s.dim}")
        projected = columns @ (columns.conj().T @ hint)
        norm = float(np.linalg.norm(projected))
        if norm > HINT_PROJECTION_FLOOR:
            vector = projected / norm
            pivot = vector[int(np.argmax(np.abs(vector)))]
            vector = vector * (abs(pivot) / pivot)
        else:
            logger.debug("Hint orthogonal to the ground cluster; using the first eigenvector")

    return GroundState(
        state=DensityMatrix.pure(vector),
        vector=vector,
        energy=s.ground_energy,
        degeneracy=ground.multiplicity,
        gap=s.ground_gap,
    )


def ground_level_state(h: HermitianOperator, deg_tol: Optional[float] = None) -> DensityMatrix:
    """Uniform mixture over the ground cluster (Π_0 / n_0)."""
    s = decompose(h, deg_tol)
    ground = s.structure.clusters[0]
    columns = s.basis[:, ground.indices]
    return DensityMatrix(columns @ columns.conj().T / ground.multiplicity)


@dataclass(frozen=True)
class LZAnalytic:
    """Closed-form LZ quench quantities for a ground state prepared at g0."""

    w_inv: float
    q_c: float
    dw_inv_dg0: float
    dq_c_dg0: float
    e0: float
    e1: float
    lam: float
    lam0: float
    phi: float
    rho_e_ground: float
    rho_e_excited: float
    rho_e_offdiag: float
    diagonal_entropy: float


def lz_analytic(p0: LZParams, delta_g: float) -> LZAnalytic:
    """LZ closed forms for the quench g0 → g0 + δg from the ground state at g0."""
    _require_finite(delta_g=delta_g)
    a, eps = p0.a, p0.eps
    x = a * delta_g
    c0 = p0.gamma0
    c = c0 + x
    lam0_sq = c0 * c0 + eps * eps
    lam_sq = c * c + eps * eps
    if lam0_sq == 0.0 or lam_sq == 0.0:
        raise SingularPoint(f"gap closes at g0={p0.g} (gamma0={c0}, delta_g={delta_g}) with eps={eps}")
    lam0 = math.sqrt(lam0_sq)
    lam = math.sqrt(lam_sq)

    w_inv = -x * c * (c0 * c + eps * eps) / (2.0 * lam0 * lam_sq)
    q_c = x * x * eps * eps / (2.0 * lam0 * lam_sq)

    poly_w = x**4 + 3 * x**3 * c0 + 2 * x**2 * c0**2 + x * c0 * lam0_sq + lam0_sq**2
    dw = -a * x * eps * eps * poly_w / (2.0 * lam0**3 * lam_sq**2)
    # derivative taken in g0, hence the extra factor a over the gamma0 form
    poly_q = eps * eps * (2 * x + 3 * c0) + c0 * (x + c0) * (x + 3 * c0)
    dq = -a * x * x * eps * eps * poly_q / (2.0 * lam0**3 * lam_sq**2)

    overlap = (c0 * c + eps * eps) / (lam0 * lam)
    ground_pop = 0.5 * (1.0 + overlap)
    excited_pop = 0.5 * (1.0 - overlap)
    offdiag = abs(x * eps) / (2.0 * lam0 * lam)

    entropy = 0.0
    for pop in (ground_pop, excited_pop):
        if pop > 1e-14:
            entropy -= pop * math.log(pop)

    return LZAnalytic(
        w_inv=w_inv,
        q_c=q_c,
        dw_inv_dg0=dw,
        dq_c_dg0=dq,
        e0=-lam,
        e1=lam,
        lam=lam,
        lam0=lam0,
        phi=lam + c,
        rho_e_ground=ground_pop,
        rho_e_excited=excited_pop,
        rho_e_offdiag=offdiag,
        diagonal_entropy=entropy,
    )


def lz_crossing_work(p0: LZParams, delta_g: float) -> float:
    """Invariant work at ε = 0: −(aδg/2)·sgn(γ0), zero at the crossing itself."""
    _require_finite(delta_g=delta_g)
    return -0.5 * p0.a * delta_g * float(np.sign(p0.gamma0))
