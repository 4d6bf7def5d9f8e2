import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Iterable, List, NoReturn, Optional, Sequence

import config
from gaugethermo import __version__
from gaugethermo.checks import twirl_check
from gaugethermo.errors import DimensionMismatch, InvalidPattern, NumericalError
from gaugethermo.models import LinearFamily, LMGParams, LZParams, lmg_family, lz_family
from gaugethermo.protocol import QuenchSpec, run_protocol, run_quench
from gaugethermo.scan import ScanRow, differentiate, scan, spectrum_scan
from storage import (
    emit_csv,
    emit_derivative_csv,
    ensure_storage_dir,
    load_hermitian,
    load_protocol_grid,
    read_csv,
    spectrum_header,
    spectrum_rows,
    write_rows,
    write_table,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2


def _output_path(args: argparse.Namespace, command: str) -> Optional[Path]:
    """None means stdout."""
    if args.out == "-":
        return None
    if args.out:
        return Path(args.out)
    return config.OUTPUT_DIR / f"{command}.csv"


def _emit_table(args: argparse.Namespace, command: str, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    path = _output_path(args, command)
    if path is None:
        write_table(sys.stdout, header, rows)
        return
    ensure_storage_dir(path)
    with open(path, "w", encoding="utf-8", newline="") as f:
        write_table(f, header, rows)
    logger.info("Wrote %s", path)


def _run_scan(family: LinearFamily, args: argparse.Namespace, command: str) -> int:
    rows: List[ScanRow] = scan(
        family,
        g0_min=args.g0_min,
        g0_max=args.g0_max,
        steps=args.steps,
        delta_g=args.delta_g,
        deg_tol=args.deg_tol,
        qu_convention=args.qu_convention,
        continuity=not args.no_continuity,
        threads=args.threads,
    )
    path = _output_path(args, command)
    if path is None:
        write_rows(sys.stdout, rows)
    else:
        emit_csv(rows, path)
        logger.info("Wrote %d rows to %s", len(rows), path)
    return EXIT_OK


def lz_command(args: argparse.Namespace) -> int:
    """Landau-Zener quench scan."""
    params = LZParams(a=args.a, delta=args.delta, eps=args.eps, g=args.g0_min)
    return _run_scan(lz_family(params), args, "lz")


def lmg_command(args: argparse.Namespace) -> int:
    """Lipkin-Meshkov-Glick quench scan."""
    params = LMGParams(k=args.k, gamma=args.gamma, j=args.j, g=args.g0_min)
    return _run_scan(lmg_family(params), args, "lmg")


def custom_command(args: argparse.Namespace) -> int:
    """Quench scan of H(g) = H0 + g·H1 read from JSON files."""
    h0 = load_hermitian(Path(args.h0))
    h1 = load_hermitian(Path(args.h1))
    if h0.dim != h1.dim:
        raise DimensionMismatch(f"H0 has dimension {h0.dim}, H1 has {h1.dim}")
    return _run_scan(LinearFamily(base=h0, direction=h1, name="custom"), args, "custom")


def deriv_command(args: argparse.Namespace) -> int:
    """Finite-difference derivative of one scan column."""
    rows = read_csv(Path(args.input))
    points = differentiate(rows, args.column, args.order)
    path = _output_path(args, "deriv")
    if path is None:
        write_table(sys.stdout, ("g0", f"d{args.order}_{args.column}"), points)
    else:
        emit_derivative_csv(points, args.column, args.order, path)
        logger.info("Wrote %s", path)
    return EXIT_OK


def _parse_pattern(raw: str) -> List[int]:
    try:
        return [int(part) for part in raw.split(",") if part.strip()]
    except ValueError:
        raise InvalidPattern(f"pattern must be comma-separated integers, got '{raw}'") from None


def twirl_check_command(args: argparse.Namespace) -> int:
    """Monte Carlo twirl against the closed form; exit 2 when it fails."""
    pattern = _parse_pattern(args.pattern)
    dim = args.dim if args.dim is not None else sum(pattern)
    report = twirl_check(dim, pattern, args.samples, args.seed, diagonal=args.diagonal)
    print(json.dumps(report.to_dict()))
    return EXIT_OK if report.passed else EXIT_NUMERICAL


def spectrum_command(args: argparse.Namespace) -> int:
    """Energy levels along g for the LZ or LMG family."""
    if args.model == "lz":
        family = lz_family(LZParams(a=args.a, delta=args.delta, eps=args.eps))
    else:
        family = lmg_family(LMGParams(k=args.k, gamma=args.gamma, j=args.j, g=max(args.g_min, 0.0)))
    grid, energies = spectrum_scan(family, args.g_min, args.g_max, args.steps)
    _emit_table(args, "spectrum", spectrum_header(energies.shape[1]), spectrum_rows(grid, energies))
    return EXIT_OK


def protocol_command(args: argparse.Namespace) -> int:
    """Integrate a driven protocol from a JSON grid and print the result."""
    grid = load_protocol_grid(Path(args.grid))
    result = run_protocol(grid, args.deg_tol)
    print(json.dumps(result.to_dict()))
    return EXIT_OK


def quench_command(args: argparse.Namespace) -> int:
    """Single sudden quench from the ground state at g0; prints the report as JSON."""
    if args.model == "lz":
        family = lz_family(LZParams(a=args.a, delta=args.delta, eps=args.eps, g=args.g0))
    else:
        family = lmg_family(LMGParams(k=args.k, gamma=args.gamma, j=args.j, g=args.g0))
    spec = QuenchSpec(
        h0=family.at(args.g0),
        h1=family.direction,
        g0=args.g0,
        delta_g=args.delta_g,
        deg_tol=args.deg_tol,
        qu_convention=args.qu_convention,
    )
    report = run_quench(spec)
    print(json.dumps({"g0": args.g0, "delta_g": args.delta_g, **report.to_dict()}))
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    """Usage errors are input errors: exit 1, not argparse's 2."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def _add_scan_flags(parser: argparse.ArgumentParser, g0_max: float, steps: int, delta_g: float) -> None:
    parser.add_argument("--g0-min", type=float, default=0.0)
    parser.add_argument("--g0-max", type=float, default=g0_max)
    parser.add_argument("--steps", type=int, default=steps)
    parser.add_argument("--delta-g", type=float, default=delta_g)
    parser.add_argument("--deg-tol", type=float, default=config.DEG_TOL, help="degeneracy tolerance (default: automatic)")
    parser.add_argument("--seed", type=int, default=config.SEED)
    parser.add_argument("--out", default=None, help="CSV path, '-' for stdout (default: OUTPUT_DIR/<command>.csv)")
    parser.add_argument("--qu-convention", choices=config.QU_CONVENTIONS, default=config.QU_CONVENTION)
    parser.add_argument("--threads", type=int, default=config.THREADS)
    parser.add_argument("--no-continuity", action="store_true", help="prepare every ground state independently")


def _add_lz_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--a", type=float, default=2.0)
    parser.add_argument("--delta", type=float, default=1.0)
    parser.add_argument("--eps", type=float, default=0.001)


def _add_lmg_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--k", type=float, default=1.0)
    parser.add_argument("--gamma", type=float, default=0.75)
    parser.add_argument("--j", type=float, default=10.0)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="gaugethermo",
        description="Gauge-invariant work, heat and entropy for quantum quenches.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    lz = sub.add_parser("lz", help="Landau-Zener quench scan")
    _add_scan_flags(lz, g0_max=0.5, steps=51, delta_g=0.1)
    _add_lz_flags(lz)
    lz.set_defaults(handler=lz_command)

    lmg = sub.add_parser("lmg", help="Lipkin-Meshkov-Glick quench scan")
    _add_scan_flags(lmg, g0_max=2.0, steps=201, delta_g=0.01)
    _add_lmg_flags(lmg)
    lmg.set_defaults(handler=lmg_command)

    custom = sub.add_parser("custom", help="quench scan of H0 + g*H1 from JSON files")
    _add_scan_flags(custom, g0_max=1.0, steps=101, delta_g=0.01)
    custom.add_argument("--h0", required=True, help='JSON file {"dim", "re", "im"}')
    custom.add_argument("--h1", required=True, help='JSON file {"dim", "re", "im"}')
    custom.set_defaults(handler=custom_command)

    deriv = sub.add_parser("deriv", help="finite-difference derivative of a scan column")
    deriv.add_argument("--in", dest="input", required=True)
    deriv.add_argument("--column", required=True)
    deriv.add_argument("--order", type=int, choices=(1, 2), default=1)
    deriv.add_argument("--out", default=None)
    deriv.set_defaults(handler=deriv_command)

    check = sub.add_parser("twirl-check", help="Monte Carlo check of the closed-form twirl")
    check.add_argument("--dim", type=int, default=None, help="defaults to the pattern sum")
    check.add_argument("--pattern", default="3,2,2,1")
    check.add_argument("--samples", type=int, default=20000)
    check.add_argument("--seed", type=int, default=config.SEED)
    check.add_argument("--diagonal", action="store_true", help="dephase the random state first")
    check.set_defaults(handler=twirl_check_command)

    spectrum = sub.add_parser("spectrum", help="energy levels along g")
    spectrum.add_argument("--model", choices=("lz", "lmg"), default="lz")
    spectrum.add_argument("--g-min", type=float, default=0.0)
    spectrum.add_argument("--g-max", type=float, default=1.0)
    spectrum.add_argument("--steps", type=int, default=101)
    spectrum.add_argument("--out", default=None)
    _add_lz_flags(spectrum)
    _add_lmg_flags(spectrum)
    spectrum.set_defaults(handler=spectrum_command)

    protocol = sub.add_parser("protocol", help="integrate a driven protocol from a JSON grid")
    protocol.add_argument("--grid", required=True)
    protocol.add_argument("--deg-tol", type=float, default=config.DEG_TOL)
    protocol.set_defaults(handler=protocol_command)

    quench = sub.add_parser("quench", help="one sudden quench from the ground state, printed as JSON")
    quench.add_argument("--model", choices=("lz", "lmg"), default="lz")
    quench.add_argument("--g0", type=float, default=0.2)
    quench.add_argument("--delta-g", type=float, default=0.1)
    quench.add_argument("--deg-tol", type=float, default=config.DEG_TOL)
    quench.add_argument("--qu-convention", choices=config.QU_CONVENTIONS, default=config.QU_CONVENTION)
    _add_lz_flags(quench)
    _add_lmg_flags(quench)
    quench.set_defaults(handler=quench_command)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Validate config, parse arguments and dispatch; returns the exit code."""
    config.validate_config()
    logging.basicConfig(
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        level=config.log_level(),
    )
    args = build_parser().parse_args(argv)

    try:
        return args.handler(args)
    except NumericalError as exc:
        logger.error("Numerical failure: %s", exc)
        print(f"Error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, OSError) as exc:
        logger.error("Invalid input: %s", exc)
        print(f"Error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
