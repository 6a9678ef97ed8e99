"""
Runtime configuration for stokes-summa.

Values come from environment variables (optionally loaded from a .env file)
and are collected into one immutable QuadratureConfig record that every
numerical routine receives.
"""

import os
import sys
import logging
import dataclasses
from dataclasses import dataclass

import psutil
from dotenv import load_dotenv

load_dotenv()

VERSION = "0.3.0"
TOOL_NAME = "stokes-summa"

# Configuration from environment variables
ABS_TOL = float(os.environ.get('STOKES_SUMMA_TOL', 1e-12))
REL_TOL = float(os.environ.get('STOKES_SUMMA_REL_TOL', 1e-10))
MAX_SUBDIVISIONS = int(os.environ.get('STOKES_SUMMA_MAX_SUBDIVISIONS', 4000))
ML_TAYLOR_RADIUS = float(os.environ.get('STOKES_SUMMA_ML_RADIUS', 5.0))
KERNEL_POINTS = int(os.environ.get('STOKES_SUMMA_KERNEL_POINTS', 1500))
KERNEL_DEPTH = int(os.environ.get('STOKES_SUMMA_KERNEL_DEPTH', 3))
LOG_LEVEL = os.environ.get('STOKES_SUMMA_LOG_LEVEL', 'INFO').upper()
LOG_DIR = os.environ.get('STOKES_SUMMA_LOG_DIR', 'logs')
CACHE_DIR = os.environ.get('STOKES_SUMMA_CACHE_DIR', '')


def thread_limit():
    """Number of worker threads, capped by STOKES_SUMMA_THREADS."""
    default = psutil.cpu_count(logical=False) or psutil.cpu_count() or 1
    raw = os.environ.get('STOKES_SUMMA_THREADS')
    if not raw:
        return default
    try:
        return max(1, int(raw))
    except ValueError:
        logging.getLogger("settings").warning(
            f"Ignoring non-integer STOKES_SUMMA_THREADS={raw!r}, using {default}")
        return default


@dataclass(frozen=True)
class QuadratureConfig:
    """
    Every tolerance and geometric default used by the integration engines.

    Attributes:
        abs_tol: absolute error target of a single integral
        rel_tol: relative error target of a single integral
        max_subdivisions: cap on adaptive bisections per integral
        lateral_offset: ε used for lateral sums u^{d±ε}
        pairing_offset: ε used for the two rays of the hyperfunction pairing
        contour_margin: extra opening of γ(d) beyond π/k
        contour_radius: radius of γ(d)
        ml_taylor_radius: |z| below which Mittag-Leffler uses its Taylor series
        kernel_points: tabulation grid size for iterated kernels
        kernel_depth: maximum number of nested kernel integrations
    """
    abs_tol: float = ABS_TOL
    rel_tol: float = REL_TOL
    max_subdivisions: int = MAX_SUBDIVISIONS
    lateral_offset: float = 0.25
    pairing_offset: float = 0.1
    contour_margin: float = 0.1
    contour_radius: float = 1.0
    ml_taylor_radius: float = ML_TAYLOR_RADIUS
    kernel_points: int = KERNEL_POINTS
    kernel_depth: int = KERNEL_DEPTH

    def with_overrides(self, **overrides):
        """Return a copy with the given fields replaced (None values are ignored)."""
        changes = {key: value for key, value in overrides.items() if value is not None}
        return dataclasses.replace(self, **changes)

    def as_dict(self):
        return dataclasses.asdict(self)


DEFAULT_CONFIG = QuadratureConfig()


def configure_logging(level=None, log_dir=None, log_name="stokes_summa.log"):
    """
    Set up root logging the way every entry point of the project does.

    Args:
        level: logging level name (default: STOKES_SUMMA_LOG_LEVEL)
        log_dir: directory for the log file (default: STOKES_SUMMA_LOG_DIR)
        log_name: file name inside log_dir
    """
    level = (level or LOG_LEVEL).upper()
    log_dir = log_dir if log_dir is not None else LOG_DIR
    handlers = [logging.StreamHandler(sys.stderr)]

    # Create logs directory if it doesn't exist
    if log_dir:
        try:
            os.makedirs(log_dir, exist_ok=True)
            handlers.append(logging.FileHandler(os.path.join(log_dir, log_name)))
        except OSError as e:
            print(f"WARNING: Could not create log directory {log_dir}: {e}", file=sys.stderr)

    logging.basicConfig(
        level=getattr(logging, level, logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers,
        force=True,
    )
