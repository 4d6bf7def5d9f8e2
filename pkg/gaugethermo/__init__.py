"""Gauge-invariant work, heat and entropy for quantum quenches and protocols."""

from gaugethermo.operators import DensityMatrix, HermitianOperator
from gaugethermo.protocol import ProtocolGrid, QuenchSpec, run_protocol, run_quench
from gaugethermo.spectral import decompose, validate_hermitian
from gaugethermo.thermo import ThermoReport, quench_report

__version__ = "0.1.0"
