"""
Command-line front end.

    python run.py classify|sum|stokes|jump|verify --config problem.json
                  [--tol T] [--eps E] [--out FILE] [--format json|csv]

Every JSON output starts with a header naming the tool, its version, the
command and the fully resolved configuration.
"""

import sys
import json
import math
import argparse
import logging
from dataclasses import dataclass, field

import numpy as np

from core import CoverPoint, as_cover_point, complex_to_json, parse_complex
from errors import StokesSummaError, SingularRayError, ValidationError
from pde import BorelSum, CauchyProblem, classify, exact_sum
from reporting import dumps, rows_to_csv, write_output
from settings import DEFAULT_CONFIG, TOOL_NAME, VERSION
from stokes import jump_report, singular_directions, stokes_table
from transforms import is_singular_direction, k_sum, laplace_integral
from verification import SUITES, run_suites

logger = logging.getLogger("cli")

COMMANDS = ("classify", "sum", "stokes", "jump", "verify")
CONFIG_FIELDS = {"problem", "z", "direction", "theta", "window", "line", "t_grid", "eps", "tol", "rel_tol", "suites"}
DEFAULT_PROBLEM = {"p": 2, "q": 0, "r": 0, "a": [1.0, 0.0], "phi": {"variant": "Polynomial", "params": {"coeffs": [1]}}}


class ArgumentParser(argparse.ArgumentParser):
    """argparse with usage errors raised as ValidationError (exit 1)."""

    def error(self, message):
        raise ValidationError(f"{self.prog}: {message}")


@dataclass
class RunConfig:
    """
    One invocation: the problem, the command and every numerical setting.

    Attributes:
        problem: CauchyProblem
        command: one of classify, sum, stokes, jump, verify
        quadrature: QuadratureConfig with --tol applied
        z: base point
        direction: summation direction for `sum` (None picks one between Stokes lines)
        theta: integration direction inside the k-sum window
        window: width of the k-sum direction window
        line: Stokes line index for `jump`
        t_grid: t-sample grid description
        eps: lateral offset override
        suites: verification suites to run (None for all)
        out: output path (None for stdout)
        format: json or csv
    """
    problem: CauchyProblem
    command: str
    quadrature: object = DEFAULT_CONFIG
    z: complex = 0j
    direction: float = None
    theta: float = None
    window: float = None
    line: int = 0
    t_grid: dict = field(default_factory=dict)
    eps: float = None
    suites: list = None
    out: str = None
    format: str = "json"

    def resolved(self):
        """The configuration as recorded in the output header."""
        return {
            "problem": self.problem.to_json(),
            "z": complex_to_json(self.z),
            "direction": self.direction,
            "theta": self.theta,
            "window": self.window,
            "line": self.line,
            "t_grid": self.t_grid,
            "eps": self.eps,
            "suites": self.suites,
            "format": self.format,
            "quadrature": self.quadrature.as_dict(),
        }


def _real(value, name):
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"{name} must be a real number, got {value!r}")
    return float(value)


def _parse_t_grid(data):
    if not isinstance(data, dict):
        raise ValidationError(f"t_grid must be an object, got {data!r}")
    unknown = set(data) - {"modulus", "count", "arg", "points"}
    if unknown:
        raise ValidationError(f"Unknown t_grid fields: {sorted(unknown)}")
    if "points" in data and set(data) - {"points"}:
        raise ValidationError("t_grid 'points' cannot be combined with a modulus grid")
    if "points" in data:
        points = data["points"]
        if not isinstance(points, list) or not points:
            raise ValidationError("t_grid 'points' must be a non-empty list")
        return {"points": [complex_to_json(parse_complex(p, "t_grid point")) for p in points]}
    modulus = data.get("modulus", [0.1, 0.3])
    if (not isinstance(modulus, list) or len(modulus) != 2
            or not all(isinstance(m, (int, float)) and not isinstance(m, bool) and m > 0 for m in modulus)):
        raise ValidationError(f"t_grid 'modulus' must be [lo, hi] with positive entries, got {modulus!r}")
    count = data.get("count", 3)
    if isinstance(count, bool) or not isinstance(count, int) or count < 1:
        raise ValidationError(f"t_grid 'count' must be a positive integer, got {count!r}")
    grid = {"modulus": [float(modulus[0]), float(modulus[1])], "count": count}
    if data.get("arg") is not None:
        grid["arg"] = _real(data["arg"], "t_grid arg")
    return grid


def t_samples(grid, default_arg):
    """Sample points of a t_grid; modulus grids are read on the cover at their argument."""
    if "points" in grid:
        return [as_cover_point(complex(re, im)) for re, im in grid["points"]]
    lo, hi = grid["modulus"]
    arg = grid.get("arg", default_arg)
    moduli = np.linspace(lo, hi, grid["count"]) if grid["count"] > 1 else np.array([lo])
    return [CoverPoint(float(m), float(arg)) for m in moduli]


def load_config(command, path=None, tol=None, eps=None, out=None, fmt="json"):
    """
    Build a RunConfig from a config file and command-line overrides.

    Raises:
        ValidationError: unreadable file, unknown fields or bad values
    """
    data = {}
    if path:
        try:
            with open(path, 'r') as f:
                data = json.load(f)
        except OSError as e:
            raise ValidationError(f"Cannot read config {path}: {e}")
        except ValueError as e:
            raise ValidationError(f"Config {path} is not valid JSON: {e}")
    if not isinstance(data, dict):
        raise ValidationError("Config must be a JSON object")
    unknown = set(data) - CONFIG_FIELDS
    if unknown:
        raise ValidationError(f"Unknown config fields: {sorted(unknown)}")

    problem = CauchyProblem.from_json(data.get("problem", DEFAULT_PROBLEM))
    quadrature = DEFAULT_CONFIG.with_overrides(
        abs_tol=tol if tol is not None else _real(data.get("tol"), "tol"),
        rel_tol=_real(data.get("rel_tol"), "rel_tol"),
    )
    line = data.get("line", 0)
    if isinstance(line, bool) or not isinstance(line, int):
        raise ValidationError(f"line must be an integer, got {line!r}")
    suites = data.get("suites")
    if suites is not None:
        if not isinstance(suites, list) or not all(s in SUITES for s in suites):
            raise ValidationError(f"suites must be a list drawn from {sorted(SUITES)}, got {suites!r}")
    if fmt not in ("json", "csv"):
        raise ValidationError(f"Unknown format {fmt!r}")

    return RunConfig(
        problem=problem,
        command=command,
        quadrature=quadrature,
        z=parse_complex(data.get("z", 0), "z"),
        direction=_real(data.get("direction"), "direction"),
        theta=_real(data.get("theta"), "theta"),
        window=_real(data.get("window"), "window"),
        line=line,
        t_grid=_parse_t_grid(data.get("t_grid", {})),
        eps=eps if eps is not None else _real(data.get("eps"), "eps"),
        suites=suites,
        out=out,
        format=fmt,
    )


def command_classify(config):
    regime = classify(config.problem)
    lines = singular_directions(config.problem, config.z) if regime.summable else []
    payload = regime.to_dict()
    payload["stokes"] = [line.direction for line in lines]
    rows = [{"regime": regime.tag, "k": regime.k if regime.k is not None else math.nan,
             "stokes": " ".join(f"{line.direction:.12e}" for line in lines)}]
    return payload, rows, 0


def _default_direction(cp, z):
    lines = singular_directions(cp, z)
    if not lines:
        return 0.0
    directions = sorted(line.direction for line in lines)
    gap = directions[1] - directions[0] if len(directions) > 1 else 2.0 * math.pi
    return directions[0] + 0.5 * min(gap, 2.0 * math.pi)


def command_sum(config):
    cp = config.problem
    regime = classify(cp)
    direction = config.direction
    samples = []
    rows = []
    if regime.summable:
        if direction is None:
            direction = _default_direction(cp, config.z)
        borel_sum = BorelSum(cp, config.z)
        if is_singular_direction(borel_sum, direction):
            line = next(line for line in singular_directions(cp, config.z)
                        if abs(math.remainder(line.direction - direction, 2.0 * math.pi)) < 1e-9)
            raise SingularRayError(
                f"Direction {direction:.12g} is the {line.case} Stokes line {line.index} "
                f"(d = {line.direction:.12g}); pick a lateral direction", direction=direction)
        kp = cp.kernel(config.quadrature)
        for t in t_samples(config.t_grid, direction):
            if config.theta is not None or config.window is not None:
                value = k_sum(kp, direction, borel_sum, t, config.theta, config.window, config.quadrature)
                error = math.nan
            else:
                result = laplace_integral(kp, direction, borel_sum, t, config.quadrature)
                value, error = result.value, result.error
            samples.append({"t": complex_to_json(t.value), "t_arg": t.arg, "value": complex_to_json(value),
                            "error": error})
            rows.append({"t_re": t.value.real, "t_im": t.value.imag, "value_re": value.real,
                         "value_im": value.imag, "error": error})
    else:
        for t in t_samples(config.t_grid, 0.0 if direction is None else direction):
            value = exact_sum(cp, t.value, config.z)
            samples.append({"t": complex_to_json(t.value), "t_arg": t.arg, "value": complex_to_json(value),
                            "error": 0.0})
            rows.append({"t_re": t.value.real, "t_im": t.value.imag, "value_re": value.real,
                         "value_im": value.imag, "error": 0.0})
    payload = {"regime": regime.tag, "direction": direction, "samples": samples}
    return payload, rows, 0


def command_stokes(config):
    rows = stokes_table(config.problem, config.z)
    regime = classify(config.problem)
    return {"regime": regime.tag, "k": regime.k, "note": regime.note, "lines": rows}, rows, 0


def command_jump(config):
    cp = config.problem
    lines = singular_directions(cp, config.z)
    matching = [line for line in lines if line.index == config.line]
    if not matching:
        raise ValidationError(f"No Stokes line with index {config.line} (problem has {len(lines)})")
    line = matching[0]
    report = jump_report(cp, line, t_samples(config.t_grid, line.direction), config.z, config.eps,
                         config.quadrature)
    return report.to_dict(), report.to_rows(), 0


def command_verify(config):
    results = run_suites(config.suites, config.quadrature)
    rows = [result.to_dict() for result in results]
    passed = all(result.passed for result in results)
    return {"passed": passed, "suites": rows}, rows, 0 if passed else 2


HANDLERS = {
    "classify": command_classify,
    "sum": command_sum,
    "stokes": command_stokes,
    "jump": command_jump,
    "verify": command_verify,
}


def build_parser():
    parser = ArgumentParser(prog=TOOL_NAME, description="Moment summation and Stokes analysis for "
                                                         "∂_t u = a(∂_t t)^p t^q ∂_z^r u")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="problem/run configuration (JSON)")
    parser.add_argument("--tol", type=float, help="absolute quadrature tolerance")
    parser.add_argument("--eps", type=float, help="lateral offset for jumps")
    parser.add_argument("--out", help="output file (default stdout)")
    parser.add_argument("--format", choices=("json", "csv"), default="json")
    parser.add_argument("--version", action="version", version=f"{TOOL_NAME} {VERSION}")
    return parser


def run(config, stdout=None):
    """
    Execute one command and write its output.

    Returns:
        exit status: 0 on success, 2 when a verification suite fails
    """
    stdout = stdout or sys.stdout
    logger.info(f"Running {config.command} on {config.problem.to_json()}")
    payload, rows, status = HANDLERS[config.command](config)
    header = {"tool": TOOL_NAME, "version": VERSION, "command": config.command, "config": config.resolved()}
    if config.format == "csv":
        text = rows_to_csv(rows, header)
    else:
        text = dumps(dict(header, result=payload))
    write_output(text, config.out, stdout)
    return status


def main(argv=None, stdout=None):
    """Parse arguments, run, and map package errors to exit codes (1 validation/domain, 2 accuracy)."""
    stdout = stdout or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        config = load_config(args.command, args.config, args.tol, args.eps, args.out, args.format)
        return run(config, stdout)
    except StokesSummaError as e:
        logger.error(f"{type(e).__name__}: {e}")
        stdout.write(dumps(e.to_dict()))
        return e.exit_code
