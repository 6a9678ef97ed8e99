"""
Stokes lines and jumps of the summed solution.

A jump across a Stokes line d is J = u^{d+ε} - u^{d-ε}. It is computed by
three routes: the Case 1 closed form, the hyperfunction pairing of the
Borel sum with e_m(s/t)/s over the two rays d ± ε, and the difference of
the two lateral sums.
"""

import math
import cmath
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations

from core import CoverPoint, as_cover_point, as_direction, complex_to_json
from errors import DomainError, ValidationError
from pde import SUMMABLE_1C, SUMMABLE_2, BorelSum, case1_directions, case2_directions, classify
from settings import DEFAULT_CONFIG, thread_limit
from transforms import laplace

logger = logging.getLogger("stokes")

CASE1 = "Case1"
CASE2 = "Case2"

# |z - z0| below this fraction of |z0| makes θ_z, and the line, ill-conditioned
CONDITIONING_RATIO = 0.1


@dataclass(frozen=True)
class StokesLine:
    """
    A Stokes line on the universal cover.

    Attributes:
        direction: cover argument of the line
        case: Case1 (index k in 0..q) or Case2 (index l in 0..r-1)
        index: line index
        k_sum: summability index of the problem
        z: base point (Case 2 lines move with z)
    """
    direction: float
    case: str
    index: int
    k_sum: float
    z: complex = 0j

    @property
    def anti_stokes(self):
        return anti_stokes_directions(self)

    def to_dict(self):
        return {
            "direction": self.direction,
            "case": self.case,
            "index": self.index,
            "k": self.k_sum,
            "z": complex_to_json(self.z),
            "anti_stokes": list(self.anti_stokes),
        }


def anti_stokes_directions(line):
    """d ± π/(2k) for a Stokes line d of a k-summable series."""
    half = math.pi / (2.0 * line.k_sum)
    return line.direction - half, line.direction + half


def singular_directions(cp, z=0.0):
    """
    Stokes lines of the problem at z.

    Returns:
        q+1 lines in Case 1, r lines in Case 2 (none when φ is entire), and
        an empty list for the convergent and entire regimes
    """
    regime = classify(cp)
    if regime.tag == SUMMABLE_1C:
        return [StokesLine(d, CASE1, k, regime.k, complex(z)) for k, d in enumerate(case1_directions(cp))]
    if regime.tag == SUMMABLE_2:
        return [StokesLine(d, CASE2, l, regime.k, complex(z)) for l, d in enumerate(case2_directions(cp, z))]
    logger.debug(f"No Stokes lines in regime {regime.tag}: {regime.note}")
    return []


def _line(cp, index, z):
    for line in singular_directions(cp, z):
        if line.index == index:
            return line
    raise ValidationError(f"Problem has no Stokes line with index {index}")


def _direction_gap(directions):
    gaps = []
    for d1, d2 in combinations(directions, 2):
        gap = abs(math.remainder(d1 - d2, 2.0 * math.pi))
        if gap > 1e-12:
            gaps.append(gap)
    return min(gaps) if gaps else 2.0 * math.pi


def lateral_offset(cp, z=0.0, eps=None, config=DEFAULT_CONFIG):
    """
    The lateral offset ε, clamped to a third of the gap between singular directions.

    Case 1 gaps are 2π/(q+1); Case 2 gaps come from the r lines at z.
    """
    eps = config.lateral_offset if eps is None else float(eps)
    if not eps > 0:
        raise ValidationError(f"Lateral offset must be positive, got {eps}")
    directions = [line.direction for line in singular_directions(cp, z)]
    limit = _direction_gap(directions) / 3.0
    if eps > limit:
        logger.info(f"Lateral offset {eps:.4g} clamped to {limit:.4g}")
        return limit
    return eps


def lift(t, direction):
    """Read t on the sheet whose argument is nearest to direction; CoverPoints are kept as given."""
    if isinstance(t, CoverPoint):
        return t
    point = as_cover_point(t)
    turns = round((direction - point.arg) / (2.0 * math.pi))
    return point.rotate(2.0 * math.pi * turns)


def lateral_sum(cp, d_side, t, z=0.0, config=DEFAULT_CONFIG):
    """u^{d_side}(t, z): Laplace transform of the Borel sum along d_side."""
    d_side = float(as_direction(d_side).theta)
    point = as_cover_point(t)
    if point.modulus == 0:
        raise DomainError("Lateral sum evaluated at t = 0")
    return laplace(cp.kernel(config), d_side, BorelSum(cp, z), lift(t, d_side), config)


def lateral_difference(cp, line, t, z=0.0, eps=None, config=DEFAULT_CONFIG):
    """u^{d+ε}(t) - u^{d-ε}(t) with the clamped offset; returns (value, ε)."""
    eps = lateral_offset(cp, z, eps, config)
    t = lift(t, line.direction)
    upper = lateral_sum(cp, line.direction + eps, t, z, config)
    lower = lateral_sum(cp, line.direction - eps, t, z, config)
    return upper - lower, eps


def jump_closed_form_case1(cp, k, t, z=0.0, config=DEFAULT_CONFIG):
    """
    Closed-form jump across the Case 1 line d_k:

        J = 2πi φ(z)/(q+1) · e_m(s_k/t),  s_k = |a(q+1)^{p-1}|^{-1/(q+1)} e^{i d_k}

    where s_k is the pole of the Borel sum on d_k.
    """
    if classify(cp).tag != SUMMABLE_1C:
        raise DomainError("The closed-form jump exists only in regime Summable1c")
    if not 0 <= k <= cp.q:
        raise ValidationError(f"Case 1 line index must lie in 0..{cp.q}, got {k}")
    d_k = case1_directions(cp)[k]
    point = lift(t, d_k)
    if point.modulus == 0:
        raise DomainError("Jump evaluated at t = 0")
    pole_modulus = abs(cp.borel_coefficient) ** (-1.0 / (cp.q + 1))
    ratio = point.inverse().scale(pole_modulus).rotate(d_k)
    phi_z = complex(cp.phi(complex(z)))
    if phi_z == 0:
        return 0j
    kernel = cp.kernel(config)
    return 2j * math.pi * phi_z / (cp.q + 1) * kernel.e(ratio)


def product_identity(q, k):
    """Π_{j≠k} (1 - e^{2πi(j-k)/(q+1)}), which equals q+1."""
    value = 1 + 0j
    for j in range(q + 1):
        if j != k:
            value *= 1 - cmath.exp(2j * math.pi * (j - k) / (q + 1))
    return value


def hyperfunction_pairing(g, d, kp, t, eps=None, config=DEFAULT_CONFIG):
    """
    Köthe pairing of the hyperfunction [g]_d with e_m(s/t)/s:

        ∫_{γ_d} g(s) e_m(s/t) ds/s,  γ_d = -γ_{d-ε} + γ_{d+ε}
    """
    d = float(as_direction(d).theta)
    eps = config.pairing_offset if eps is None else float(eps)
    if not eps > 0:
        raise ValidationError(f"Pairing offset must be positive, got {eps}")
    point = lift(t, d)
    return laplace(kp, d + eps, g, point, config) - laplace(kp, d - eps, g, point, config)


def conditioning_warning(cp, z):
    """Warning text when z sits too close to the singular point of φ, else None."""
    z0 = cp.phi.singular_point
    if z0 is None:
        return None
    distance = abs(complex(z) - z0)
    if distance < CONDITIONING_RATIO * abs(z0):
        return (f"|z - z0| = {distance:.3g} < {CONDITIONING_RATIO}·|z0|: "
                f"theta_z and the Stokes lines are ill-conditioned")
    return None


def jump_case2(cp, l, t, z=0.0, eps=None, config=DEFAULT_CONFIG):
    """
    Case 2 jump across δ_l: the pairing of the l-th translate φ(z + ω^l b s^κ)/r.

    Only that translate is singular on δ_l, so the others pair to zero.
    """
    if classify(cp).tag != SUMMABLE_2:
        raise DomainError("jump_case2 needs regime Summable2")
    if cp.phi.singular_point is None:
        raise DomainError("phi is entire: Case 2 Borel sums have no Stokes lines")
    line = _line(cp, l, z)
    if as_cover_point(t).modulus == 0:
        raise DomainError("Jump evaluated at t = 0")
    warning = conditioning_warning(cp, z)
    if warning:
        logger.warning(warning)
    translate = BorelSum(cp, z).translate(l)
    return hyperfunction_pairing(translate, line.direction, cp.kernel(config), t, eps, config)


def jump_at_z(cp, line, t, z, config=DEFAULT_CONFIG):
    """
    The jump across `line` at another base point z.

    Case 1 lines do not move, so only the factor φ(z) changes; Case 2 lines
    are recomputed from θ_z at the new z.
    """
    if line.case == CASE1:
        return jump_closed_form_case1(cp, line.index, t, z, config)
    return jump_case2(cp, line.index, t, z, config=config)


def _relative_deviation(x, y):
    scale = max(abs(x), abs(y))
    return abs(x - y) / scale if scale > 0 else 0.0


@dataclass
class JumpReport:
    """
    Per-route jump values on a list of t samples.

    closed_form is present for Case 1 lines only; eps is the clamped
    lateral offset used by the lateral route.
    """
    line: StokesLine
    samples: list
    pairing: list
    lateral: list
    eps: float
    closed_form: list = None
    warnings: list = field(default_factory=list)

    @property
    def max_rel_disagreement(self):
        worst = 0.0
        for i in range(len(self.samples)):
            routes = [self.pairing[i], self.lateral[i]]
            if self.closed_form is not None:
                routes.append(self.closed_form[i])
            for x, y in combinations(routes, 2):
                worst = max(worst, _relative_deviation(x, y))
        return worst

    def to_dict(self):
        samples = []
        for i, t in enumerate(self.samples):
            entry = {"t": complex_to_json(t.value), "t_arg": t.arg}
            entry["closed"] = complex_to_json(self.closed_form[i]) if self.closed_form is not None else None
            entry["pairing"] = complex_to_json(self.pairing[i])
            entry["lateral"] = complex_to_json(self.lateral[i])
            entry["eps"] = self.eps
            samples.append(entry)
        return {
            "line": self.line.to_dict(),
            "samples": samples,
            "max_rel_disagreement": self.max_rel_disagreement,
            "warnings": list(self.warnings),
        }

    def to_rows(self):
        """One CSV row per sample with re/im columns per route."""
        rows = []
        for i, t in enumerate(self.samples):
            closed = self.closed_form[i] if self.closed_form is not None else complex('nan')
            rows.append({
                "t_re": t.value.real, "t_im": t.value.imag,
                "closed_re": closed.real, "closed_im": closed.imag,
                "pairing_re": self.pairing[i].real, "pairing_im": self.pairing[i].imag,
                "lateral_re": self.lateral[i].real, "lateral_im": self.lateral[i].imag,
                "eps": self.eps,
            })
        return rows


def jump_report(cp, line, t_samples, z=0.0, eps=None, config=DEFAULT_CONFIG):
    """
    Evaluate every available route on each t sample.

    Samples run on a thread pool capped by STOKES_SUMMA_THREADS; results
    keep the order of t_samples.
    """
    if not t_samples:
        raise ValidationError("jump_report needs at least one t sample")
    samples = [lift(t, line.direction) for t in t_samples]
    lateral_eps = lateral_offset(cp, z, eps, config)
    kp = cp.kernel(config)
    case1 = line.case == CASE1
    borel_sum = BorelSum(cp, z)
    pairing_target = borel_sum if case1 else borel_sum.translate(line.index)
    pairing_eps = min(config.pairing_offset, lateral_eps)

    def evaluate(t):
        pairing = hyperfunction_pairing(pairing_target, line.direction, kp, t, pairing_eps, config)
        lateral, _ = lateral_difference(cp, line, t, z, lateral_eps, config)
        closed = jump_closed_form_case1(cp, line.index, t, z, config) if case1 else None
        return closed, pairing, lateral

    if hasattr(kp, 'table'):
        # tables for the first sample's rays are built before fanning out
        for offset in (pairing_eps, -pairing_eps, lateral_eps, -lateral_eps):
            kp.table(line.direction + offset - samples[0].arg)
    with ThreadPoolExecutor(max_workers=thread_limit()) as executor:
        results = list(executor.map(evaluate, samples))

    warnings = []
    if not case1:
        warning = conditioning_warning(cp, z)
        if warning:
            warnings.append(warning)
    report = JumpReport(
        line=line,
        samples=samples,
        pairing=[pairing for _, pairing, _ in results],
        lateral=[lateral for _, _, lateral in results],
        eps=lateral_eps,
        closed_form=[closed for closed, _, _ in results] if case1 else None,
        warnings=warnings,
    )
    logger.info(f"Jump report on {line.case} line {line.index} (d={line.direction:.6f}): "
                f"{len(samples)} samples, max disagreement {report.max_rel_disagreement:.3e}")
    return report


def stokes_table(cp, z=0.0):
    """Rows of Stokes and anti-Stokes directions for the `stokes` command."""
    rows = []
    for line in singular_directions(cp, z):
        rows.append({"kind": "stokes", "case": line.case, "index": line.index,
                     "direction": line.direction, "k": line.k_sum})
        for side, direction in zip(("minus", "plus"), line.anti_stokes):
            rows.append({"kind": f"anti_stokes_{side}", "case": line.case, "index": line.index,
                         "direction": direction, "k": line.k_sum})
    return rows
