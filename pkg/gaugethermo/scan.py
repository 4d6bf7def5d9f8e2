"""Parameter scans over g0, derivative post-processing and spectrum sweeps."""

import logging
import math
import multiprocessing
from dataclasses import dataclass, fields
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from gaugethermo.errors import (
    GaugeThermoError,
    InvalidGrid,
    InvalidParams,
    NonFiniteParameter,
    NonUniformGrid,
    UnknownColumn,
)
from gaugethermo.models import LinearFamily, ground_state
from gaugethermo.operators import DensityMatrix
from gaugethermo.thermo import QU_CONVENTIONS, ThermoReport, quench_report

logger = logging.getLogger(__name__)

UNIFORM_RTOL = 1e-6


@dataclass(frozen=True)
class ScanRow:
    """One g0 point of a scan; field order is the CSV column order."""

    g0: float
    delta_g: float
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
    e0: float
    ground_gap: float
    ground_degeneracy: int

    @classmethod
    def from_report(cls, g0: float, delta_g: float, report: ThermoReport) -> "ScanRow":
        return cls(
            g0=g0,
            delta_g=delta_g,
            w_inv=report.w_inv,
            q_c=report.q_c,
            q_inv=report.q_inv,
            w_u=report.w_u,
            q_u=report.q_u,
            w_tpm=report.w_tpm,
            delta_u=report.delta_u,
            s_u=report.s_u,
            s_d=report.s_d,
            s_gt=report.s_gt,
            s_gamma=report.s_gamma,
            coherence=report.coherence,
            e0=report.ground_energy,
            ground_gap=report.ground_gap,
            ground_degeneracy=report.ground_degeneracy,
        )

    def value(self, column: str) -> float:
        """Look a value up by CSV header name or attribute name."""
        return getattr(self, column_attribute(column))


CSV_HEADER: Tuple[str, ...] = (
    "g0",
    "delta_g",
    "W_inv",
    "Q_c",
    "Q_inv",
    "W_u",
    "Q_u",
    "W_tpm",
    "delta_U",
    "S_u",
    "S_d",
    "S_GT",
    "S_Gamma",
    "C",
    "E0",
    "ground_gap",
    "ground_degeneracy",
)

COLUMN_ATTRIBUTES: Dict[str, str] = dict(zip(CSV_HEADER, (f.name for f in fields(ScanRow))))


def column_attribute(column: str) -> str:
    if column in COLUMN_ATTRIBUTES:
        return COLUMN_ATTRIBUTES[column]
    if column in COLUMN_ATTRIBUTES.values():
        return column
    raise UnknownColumn(f"unknown column {column!r}; expected one of {', '.join(CSV_HEADER)}")


def scan_grid(g0_min: float, g0_max: float, steps: int) -> np.ndarray:
    if not (math.isfinite(g0_min) and math.isfinite(g0_max)):
        raise NonFiniteParameter(f"grid bounds must be finite, got [{g0_min}, {g0_max}]")
    if steps < 2:
        raise InvalidGrid(f"a scan needs at least 2 steps, got {steps}")
    if not g0_min < g0_max:
        raise InvalidGrid(f"grid minimum {g0_min} must be below maximum {g0_max}")
    return np.linspace(g0_min, g0_max, steps)


def _evaluate_point(
    family: LinearFamily,
    delta_g: float,
    deg_tol: Optional[float],
    qu_convention: str,
    g0: float,
    vector: Optional[np.ndarray],
) -> ScanRow:
    try:
        h0 = family.at(g0)
        rho0 = DensityMatrix.pure(vector) if vector is not None else ground_state(h0, deg_tol).state
        report = quench_report(rho0, h0, family.direction, delta_g, deg_tol, qu_convention)
    except GaugeThermoError as exc:
        raise type(exc)(f"g0={g0:.17g}: {exc}") from exc
    return ScanRow.from_report(g0, delta_g, report)


_worker_settings: Dict = {}


def _init_worker(family: LinearFamily, delta_g: float, deg_tol: Optional[float], qu_convention: str) -> None:
    _worker_settings.update(family=family, delta_g=delta_g, deg_tol=deg_tol, qu_convention=qu_convention)


def _pool_point(task: Tuple[float, Optional[np.ndarray]]) -> ScanRow:
    g0, vector = task
    return _evaluate_point(g0=g0, vector=vector, **_worker_settings)


def continuity_vectors(family: LinearFamily, grid: Sequence[float], deg_tol: Optional[float]) -> List[np.ndarray]:
    """Ground-state vectors prepared in grid order, each hinted by its predecessor."""
    vectors: List[np.ndarray] = []
    hint = None
    for g0 in grid:
        try:
            prepared = ground_state(family.at(float(g0)), deg_tol, hint)
        except GaugeThermoError as exc:
            raise type(exc)(f"g0={float(g0):.17g}: {exc}") from exc
        vectors.append(prepared.vector)
        hint = prepared.vector
    return vectors


def scan(
    family: LinearFamily,
    g0_min: float,
    g0_max: float,
    steps: int,
    delta_g: float,
    deg_tol: Optional[float] = None,
    qu_convention: str = "first-law",
    continuity: bool = True,
    threads: int = 1,
) -> List[ScanRow]:
    """Quench report at every point of a uniform g0 grid, rows in grid order."""
    grid = scan_grid(g0_min, g0_max, steps)
    if not math.isfinite(delta_g):
        raise NonFiniteParameter(f"delta_g must be finite, got {delta_g}")
    if deg_tol is not None and not deg_tol > 0:
        raise InvalidParams(f"deg_tol must be positive, got {deg_tol}")
    if qu_convention not in QU_CONVENTIONS:
        raise InvalidParams(f"unknown Q_u convention {qu_convention!r}")
    if threads < 1:
        raise InvalidParams(f"threads must be at least 1, got {threads}")

    logger.info(
        "Scanning %s: g0 in [%g, %g] x %d, delta_g=%g, %d worker(s), continuity %s",
        family.name,
        g0_min,
        g0_max,
        steps,
        delta_g,
        threads,
        "on" if continuity else "off",
    )

    vectors: List[Optional[np.ndarray]]
    if continuity:
        vectors = list(continuity_vectors(family, grid, deg_tol))
    else:
        vectors = [None] * len(grid)
    tasks = [(float(g0), vector) for g0, vector in zip(grid, vectors)]
    settings = (family, delta_g, deg_tol, qu_convention)

    if threads > 1:
        with multiprocessing.Pool(processes=min(threads, len(tasks)), initializer=_init_worker, initargs=settings) as pool:
            rows = pool.map(_pool_point, tasks)
    else:
        rows = []
        for g0, vector in tasks:
            rows.append(_evaluate_point(*settings, g0=g0, vector=vector))
            logger.debug("g0=%g done", g0)

    logger.info("Scan finished: %d rows", len(rows))
    return rows


def differentiate(rows: Sequence[ScanRow], column: str, order: int = 1) -> List[Tuple[float, float]]:
    """Finite-difference derivative of a column with respect to g0.

    Second-order central stencils inside the grid; second-order one-sided
    stencils at the ends (first-order for a 3-point second derivative).
    """
    attribute = column_attribute(column)
    if order not in (1, 2):
        raise InvalidParams(f"derivative order must be 1 or 2, got {order}")
    if len(rows) < 3:
        raise InvalidGrid(f"need at least 3 rows to differentiate, got {len(rows)}")

    g0 = np.array([row.g0 for row in rows], dtype=float)
    y = np.array([getattr(row, attribute) for row in rows], dtype=float)
    if not np.all(np.isfinite(y)):
        raise NonFiniteParameter(f"column {column} contains non-finite values")
    steps = np.diff(g0)
    h = float(steps[0])
    if h <= 0 or not np.allclose(steps, h, rtol=UNIFORM_RTOL, atol=0.0):
        raise NonUniformGrid(f"g0 grid is not uniform (steps range {steps.min():.6g} to {steps.max():.6g})")

    if order == 1:
        derivative = np.gradient(y, h, edge_order=2)
    else:
        derivative = np.empty_like(y)
        derivative[1:-1] = (y[2:] - 2.0 * y[1:-1] + y[:-2]) / h**2
        if len(y) >= 4:
            derivative[0] = (2.0 * y[0] - 5.0 * y[1] + 4.0 * y[2] - y[3]) / h**2
            derivative[-1] = (2.0 * y[-1] - 5.0 * y[-2] + 4.0 * y[-3] - y[-4]) / h**2
        else:
            derivative[0] = (y[0] - 2.0 * y[1] + y[2]) / h**2
            derivative[-1] = derivative[0]
    return [(float(g), float(d)) for g, d in zip(g0, derivative)]


def spectrum_scan(family: LinearFamily, g_min: float, g_max: float, steps: int) -> Tuple[np.ndarray, np.ndarray]:
    """Eigenvalues of H(g) along a grid: (grid, energies with shape (steps, dim))."""
    grid = scan_grid(g_min, g_max, steps)
    energies = np.array([scipy.linalg.eigvalsh(family.at(float(g)).matrix) for g in grid])
    logger.info("Spectrum of %s over %d points (dimension %d)", family.name, steps, energies.shape[1])
    return grid, energies
