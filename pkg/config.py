import logging
import os
import sys
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv

load_dotenv()

ROOT: Path = Path(__file__).parent
DATA_DIR: Path = ROOT / "data"

QU_CONVENTIONS = ("first-law", "zero")
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")

DEG_TOL: Optional[float] = None
THREADS: int = os.cpu_count() or 1
SEED: int = 0
QU_CONVENTION: str = os.getenv("QU_CONVENTION", "first-law")
LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO")
OUTPUT_DIR: Path = Path(os.getenv("OUTPUT_DIR", "./data"))


def log_level() -> int:
    return getattr(logging, LOG_LEVEL)


def validate_config() -> None:
    """Validate settings from the environment and .env file.

    Exits with a clear error message if anything is invalid.
    """
    global DEG_TOL, THREADS, SEED, QU_CONVENTION, LOG_LEVEL, OUTPUT_DIR

    raw_tol = os.getenv("DEG_TOL", "")
    if raw_tol:
        try:
            DEG_TOL = float(raw_tol)
        except ValueError:
            sys.exit(f"Error: DEG_TOL must be a number, got '{raw_tol}'.")
        if not DEG_TOL > 0:
            sys.exit(f"Error: DEG_TOL must be positive, got '{raw_tol}'.")
    else:
        DEG_TOL = None

    raw_threads = os.getenv("THREADS", "")
    if raw_threads:
        try:
            THREADS = int(raw_threads)
        except ValueError:
            sys.exit(f"Error: THREADS must be an integer, got '{raw_threads}'.")
        if THREADS < 1:
            sys.exit(f"Error: THREADS must be at least 1, got '{raw_threads}'.")
    else:
        THREADS = os.cpu_count() or 1

    raw_seed = os.getenv("SEED", "0")
    try:
        SEED = int(raw_seed)
    except ValueError:
        sys.exit(f"Error: SEED must be an integer, got '{raw_seed}'.")

    QU_CONVENTION = os.getenv("QU_CONVENTION", "first-law")
    if QU_CONVENTION not in QU_CONVENTIONS:
        sys.exit(f"Error: QU_CONVENTION must be one of {', '.join(QU_CONVENTIONS)}, got '{QU_CONVENTION}'.")

    LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO").upper()
    if LOG_LEVEL not in LOG_LEVELS:
        sys.exit(f"Error: LOG_LEVEL must be one of {', '.join(LOG_LEVELS)}, got '{LOG_LEVEL}'.")

    OUTPUT_DIR = Path(os.getenv("OUTPUT_DIR", "./data"))
