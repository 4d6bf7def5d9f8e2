import csv
import json
from pathlib import Path
from typing import Iterable, List, Sequence, TextIO, Tuple

import numpy as np

from gaugethermo.errors import UnknownColumn
from gaugethermo.operators import HermitianOperator, matrix_from_json
from gaugethermo.protocol import ProtocolGrid
from gaugethermo.scan import CSV_HEADER, ScanRow
from gaugethermo.spectral import validate_hermitian


def ensure_storage_dir(file_path: Path) -> None:
    """Create the parent directory for the output file if it doesn't exist."""
    file_path.parent.mkdir(parents=True, exist_ok=True)


def format_value(value) -> str:
    """Integers as-is, floats with 17 significant digits (round-trip exact)."""
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return format(float(value), ".17g")


def write_table(handle: TextIO, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    writer = csv.writer(handle, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(v) for v in row])


def write_rows(handle: TextIO, rows: Iterable[ScanRow]) -> None:
    write_table(handle, CSV_HEADER, ([row.value(c) for c in CSV_HEADER] for row in rows))


def emit_csv(rows: Iterable[ScanRow], path: Path) -> None:
    """Write scan rows with the fixed 17-column header."""
    ensure_storage_dir(path)
    with open(path, "w", encoding="utf-8", newline="") as f:
        write_rows(f, rows)


def read_csv(path: Path) -> List[ScanRow]:
    """Parse a file written by emit_csv back into rows."""
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None or tuple(header) != CSV_HEADER:
            raise UnknownColumn(f"{path} does not carry the scan header")
        rows = []
        for number, line in enumerate(reader, start=2):
            if not line:
                continue
            if len(line) != len(CSV_HEADER):
                raise UnknownColumn(f"{path} line {number} has {len(line)} fields, expected {len(CSV_HEADER)}")
            values = {}
            for column, text in zip(CSV_HEADER, line):
                values[column] = int(text) if column == "ground_degeneracy" else float(text)
            rows.append(ScanRow(*(values[c] for c in CSV_HEADER)))
    return rows


def emit_derivative_csv(points: Sequence[Tuple[float, float]], column: str, order: int, path: Path) -> None:
    ensure_storage_dir(path)
    with open(path, "w", encoding="utf-8", newline="") as f:
        write_table(f, ("g0", f"d{order}_{column}"), points)


def spectrum_header(dim: int) -> List[str]:
    return ["g"] + [f"E{i}" for i in range(dim)]


def spectrum_rows(grid: np.ndarray, energies: np.ndarray) -> List[List[float]]:
    return [[float(g)] + [float(e) for e in level] for g, level in zip(grid, energies)]


def load_json(path: Path) -> dict:
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def load_hermitian(path: Path) -> HermitianOperator:
    """Read a {"dim", "re", "im"} JSON file as a validated Hermitian operator."""
    return validate_hermitian(matrix_from_json(load_json(path), name=Path(path).name))


def load_protocol_grid(path: Path) -> ProtocolGrid:
    return ProtocolGrid.from_json(load_json(path))
