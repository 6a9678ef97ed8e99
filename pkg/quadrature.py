"""
Adaptive Gauss-Kronrod integration for complex-valued integrands.

Every integral in the package goes through integrate_interval: a global
adaptive G7K15 scheme that keeps bisecting the subinterval with the largest
error estimate. Integrands are called with numpy arrays of nodes so each
rule application is one vectorised evaluation.

ray_integral and contour_integral parametrise the rays e^{id}R+ and the
three-leg contour γ(d) onto real intervals.
"""

import math
import cmath
import heapq
import logging
from dataclasses import dataclass

import numpy as np

from core import as_direction
from errors import AccuracyError, DomainError, SingularRayError
from settings import DEFAULT_CONFIG

logger = logging.getLogger("quadrature")

# Kronrod abscissae on [0, 1), largest first, then the centre
_XGK = (
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
)
_WGK = (
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
)
# Gauss weights for the abscissae _XGK[1], _XGK[3], _XGK[5], _XGK[7]
_WG = (
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
)

NODES = np.array([-x for x in _XGK[:7]] + [0.0] + list(reversed(_XGK[:7])))
KRONROD_WEIGHTS = np.array(list(_WGK[:7]) + [_WGK[7]] + list(reversed(_WGK[:7])))
GAUSS_WEIGHTS = np.zeros(15)
for _i, _w in zip((1, 3, 5), _WG[:3]):
    GAUSS_WEIGHTS[_i] = _w
    GAUSS_WEIGHTS[14 - _i] = _w
GAUSS_WEIGHTS[7] = _WG[3]

# Number of geometric breakpoints accumulating at the origin of a ray
GRADED_LEVELS = 40
# Doublings allowed while searching for a truncation radius
MAX_DOUBLINGS = 90


@dataclass(frozen=True)
class QuadratureResult:
    """Value and error estimate of one integral."""
    value: complex
    error: float
    evaluations: int = 0
    intervals: int = 0

    def __add__(self, other):
        return QuadratureResult(
            self.value + other.value,
            self.error + other.error,
            self.evaluations + other.evaluations,
            self.intervals + other.intervals,
        )

    def scaled(self, factor):
        return QuadratureResult(self.value * factor, self.error * abs(factor), self.evaluations, self.intervals)


@dataclass(frozen=True)
class RayQuadratureSpec:
    """
    Parameters of one ray integral ∫_{e^{id}R+}.

    truncation_radius None means it is chosen from the sampled decay of the
    integrand; scale is the natural length of the integrand (|t| for Laplace
    integrals) and seeds the radius search and the graded mesh.
    """
    direction: float
    abs_tol: float = DEFAULT_CONFIG.abs_tol
    rel_tol: float = DEFAULT_CONFIG.rel_tol
    max_subdivisions: int = DEFAULT_CONFIG.max_subdivisions
    truncation_radius: float = None
    scale: float = 1.0

    @classmethod
    def from_config(cls, direction, config=DEFAULT_CONFIG, **kwargs):
        return cls(
            direction=float(as_direction(direction).theta),
            abs_tol=config.abs_tol,
            rel_tol=config.rel_tol,
            max_subdivisions=config.max_subdivisions,
            **kwargs,
        )


def _apply_rule(f, a, b):
    """One G7K15 application on [a, b]; returns (kronrod, |kronrod - gauss|, values)."""
    center = 0.5 * (a + b)
    half = 0.5 * (b - a)
    x = center + half * NODES
    fx = np.asarray(f(x), dtype=complex)
    if fx.shape != x.shape:
        fx = np.broadcast_to(fx, x.shape)
    kronrod = half * np.dot(KRONROD_WEIGHTS, fx)
    gauss = half * np.dot(GAUSS_WEIGHTS, fx)
    return complex(kronrod), abs(kronrod - gauss), x, fx


def _check_finite(x, fx, on_singular):
    bad = ~np.isfinite(fx)
    if bad.any():
        location = float(x[np.argmax(bad)])
        on_singular(location)


def _raise_singular(location):
    raise SingularRayError(f"Integrand is not finite at {location:.6g}", location=location)


def integrate_interval(f, a, b, abs_tol=DEFAULT_CONFIG.abs_tol, rel_tol=DEFAULT_CONFIG.rel_tol,
                       max_subdivisions=DEFAULT_CONFIG.max_subdivisions, breakpoints=None,
                       on_singular=None):
    """
    Integrate a complex integrand over the real interval [a, b].

    Args:
        f: vectorised integrand, called with a numpy array of nodes
        a, b: finite limits, a < b
        abs_tol, rel_tol: success when the summed error estimate is
            below max(abs_tol, rel_tol * |value|)
        max_subdivisions: bisection budget
        breakpoints: optional interior points that seed the initial partition
        on_singular: callback(location) raising the caller's error for a
            non-finite integrand value or a collapsing subinterval

    Returns:
        QuadratureResult
    """
    on_singular = on_singular or _raise_singular
    if not (math.isfinite(a) and math.isfinite(b)) or b <= a:
        raise DomainError(f"Invalid integration interval [{a}, {b}]")

    points = sorted({float(a), float(b)} | {float(p) for p in (breakpoints or []) if a < p < b})
    heap = []
    evaluations = 0
    for lo, hi in zip(points[:-1], points[1:]):
        value, error, x, fx = _apply_rule(f, lo, hi)
        _check_finite(x, fx, on_singular)
        evaluations += 15
        heapq.heappush(heap, (-error, lo, hi, value))

    subdivisions = 0
    running_error = math.fsum(-item[0] for item in heap)
    running_value = sum(item[3] for item in heap)
    while True:
        if running_error <= max(abs_tol, rel_tol * abs(running_value)) or subdivisions >= max_subdivisions:
            # exact, order-independent totals from the final partition
            ordered = sorted(heap, key=lambda item: item[1])
            total_error = math.fsum(-item[0] for item in ordered)
            total = complex(math.fsum(item[3].real for item in ordered),
                            math.fsum(item[3].imag for item in ordered))
            if total_error <= max(abs_tol, rel_tol * abs(total)):
                return QuadratureResult(total, total_error, evaluations, len(heap))
            if subdivisions >= max_subdivisions:
                raise AccuracyError(
                    f"Quadrature on [{a:.6g}, {b:.6g}] hit {max_subdivisions} subdivisions "
                    f"with error {total_error:.3e}", estimate=total, error=total_error)
            running_error, running_value = total_error, total

        neg_error, lo, hi, old_value = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if hi - lo <= 64.0 * np.finfo(float).eps * max(abs(lo), abs(hi)):
            on_singular(mid)
            raise AccuracyError(f"Subinterval collapsed at {mid:.6g}", estimate=running_value, error=running_error)
        running_error += neg_error
        running_value -= old_value
        for left, right in ((lo, mid), (mid, hi)):
            value, error, x, fx = _apply_rule(f, left, right)
            _check_finite(x, fx, on_singular)
            evaluations += 15
            running_error += error
            running_value += value
            heapq.heappush(heap, (-error, left, right, value))
        subdivisions += 1


def graded_breakpoints(radius, levels=GRADED_LEVELS):
    """radius·2^{-j}, j = 1..levels: a mesh accumulating geometrically at 0."""
    return [radius * 2.0 ** (-j) for j in range(1, levels + 1)]


def _block_bound(g, lo, hi):
    xs = np.linspace(lo, hi, 9)
    values = np.abs(np.asarray(g(xs), dtype=complex))
    if not np.all(np.isfinite(values)):
        return math.inf
    return (hi - lo) * float(values.max())


def truncation_radius(g, scale, tol):
    """
    Radius R with sampled tail bound ∫_R^∞ |g| < tol/2.

    Marches over the blocks [x, 2x] from x = scale/2, bounding each block by
    its length times the largest sampled |g|, and stops once the bounds
    have decreased for three consecutive blocks below tol·1e-6.
    """
    x = 0.5 * scale
    bounds = []
    starts = []
    decreasing = 0
    for _ in range(MAX_DOUBLINGS):
        bound = _block_bound(g, x, 2.0 * x)
        starts.append(x)
        bounds.append(bound)
        if len(bounds) > 1 and bound <= bounds[-2]:
            decreasing += 1
        else:
            decreasing = 0
        if decreasing >= 3 and bound < tol * 1e-6:
            break
        x *= 2.0
    else:
        raise AccuracyError(f"Integrand shows no decay up to |x| = {x:.3e}")

    tail = 0.0
    radius = starts[-1] * 2.0
    for start, bound in zip(reversed(starts), reversed(bounds)):
        if tail + bound >= 0.5 * tol:
            break
        tail += bound
        radius = start
    return radius, tail


def ray_integral(f, spec, polar=False):
    """
    ∫ over the ray e^{id}R+ of f(s) ds.

    Args:
        f: vectorised integrand; f(s) of the complex variable s, or with
            polar=True f(x, d) of the modulus array x and the cover direction d
        spec: RayQuadratureSpec
        polar: calling convention of f

    Returns:
        QuadratureResult with the sampled tail bound added to the error
    """
    d = spec.direction
    unit = cmath.exp(1j * d)

    def on_singular(location):
        raise SingularRayError(
            f"Integrand singular on the ray arg s = {d:.6g} near |s| = {location:.6g}",
            direction=d, location=location)

    if polar:
        def g(x):
            return np.asarray(f(np.asarray(x, dtype=float), d), dtype=complex) * unit
    else:
        def g(x):
            return np.asarray(f(unit * np.asarray(x, dtype=float)), dtype=complex) * unit

    if spec.truncation_radius is None:
        radius, tail = truncation_radius(g, spec.scale, spec.abs_tol)
    else:
        radius, tail = float(spec.truncation_radius), 0.0
    if not radius > 0:
        raise DomainError(f"Ray truncation radius must be positive, got {radius}")

    result = integrate_interval(
        g, 0.0, radius, abs_tol=0.5 * spec.abs_tol, rel_tol=spec.rel_tol,
        max_subdivisions=spec.max_subdivisions,
        breakpoints=graded_breakpoints(radius), on_singular=on_singular)
    logger.debug(f"Ray d={d:.6f}: R={radius:.4g}, value={result.value:.6e}, "
                 f"error={result.error:.2e}, evaluations={result.evaluations}")
    return QuadratureResult(result.value, result.error + tail, result.evaluations, result.intervals)


@dataclass(frozen=True)
class ContourGammaD:
    """
    The contour γ(d): boundary of the sector S_d(opening, radius).

    Traversed as the ray at d + opening/2 outwards, the arc from
    d + opening/2 down to d - opening/2, and the ray at d - opening/2 back
    to the origin.
    """
    direction: float
    opening: float
    radius: float

    @classmethod
    def for_order(cls, d, k, config=DEFAULT_CONFIG, radius=None):
        """Default contour for kernel order k: opening π/k + margin."""
        return cls(float(as_direction(d).theta), math.pi / k + config.contour_margin,
                   config.contour_radius if radius is None else radius)

    @property
    def half_opening(self):
        return 0.5 * self.opening


def contour_integral(f, contour, abs_tol=DEFAULT_CONFIG.abs_tol, rel_tol=DEFAULT_CONFIG.rel_tol,
                     max_subdivisions=DEFAULT_CONFIG.max_subdivisions, graded_levels=GRADED_LEVELS):
    """
    ∮_{γ(d)} f dt on the three legs of the contour.

    Args:
        f: vectorised integrand f(modulus, arg) in polar form on the cover
        contour: ContourGammaD

    Returns:
        QuadratureResult summed over the legs
    """
    if not contour.radius > 0 or not math.isfinite(contour.radius):
        raise DomainError(f"Contour radius must be positive and finite, got {contour.radius}")
    if not contour.opening > 0:
        raise DomainError(f"Contour opening must be positive, got {contour.opening}")

    radius = contour.radius
    upper = contour.direction + contour.half_opening
    lower = contour.direction - contour.half_opening
    e_up = cmath.exp(1j * upper)
    e_low = cmath.exp(1j * lower)
    leg_tol = abs_tol / 3.0

    def on_singular(location):
        raise SingularRayError(f"Contour integrand singular near parameter {location:.6g}",
                               direction=contour.direction, location=location)

    def outward(x):
        return np.asarray(f(x, np.full_like(x, upper)), dtype=complex) * e_up

    def arc(phi):
        t = radius * np.exp(1j * phi)
        return np.asarray(f(np.full_like(phi, radius), phi), dtype=complex) * 1j * t

    def inward(x):
        return np.asarray(f(x, np.full_like(x, lower)), dtype=complex) * e_low

    graded = graded_breakpoints(radius, graded_levels)
    out_leg = integrate_interval(outward, 0.0, radius, leg_tol, rel_tol, max_subdivisions, graded, on_singular)
    # the arc runs clockwise, from `upper` down to `lower`
    arc_leg = integrate_interval(arc, lower, upper, leg_tol, rel_tol, max_subdivisions, None, on_singular).scaled(-1.0)
    in_leg = integrate_interval(inward, 0.0, radius, leg_tol, rel_tol, max_subdivisions, graded, on_singular).scaled(-1.0)
    total = out_leg + arc_leg + in_leg
    logger.debug(f"Contour d={contour.direction:.6f}: value={total.value:.6e}, error={total.error:.2e}")
    return total
